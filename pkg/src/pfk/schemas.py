"""JSON loaders and serializers for every object the CLI touches.

Loaders normalize rather than reject where the spec of the format allows
it: order relations are closed reflexively and transitively, open-set
families get the empty set, the full set, and missing unions and
intersections added, and every such repair is reported in the notes.
Structural problems are collected into a SchemaError with a path per
entry instead of failing at the first one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .bitsets import mask_of
from .caps import resolve_cap
from .frame import Locale, make_locale
from .linfq import (FqLinearMap, FqSpace, FqSubspace, enumerate_subspaces,
                    span, vector_from_str)
from .linloc import LinLocale, build_linloc, linloc_from_line_values
from .order import FinLattice, StructureError, make_poset
from .space import CtsMap, FinSpace, discrete_space, generate_topology, indiscrete_space
from .bundle import QVBundle, kernel_bundle


class SchemaError(ValueError):
    def __init__(self, errors):
        super().__init__("; ".join(f"{p}: {m}" for p, m in errors))
        self.errors = errors


@dataclass
class Loaded:
    value: object
    notes: list[str]


def _as_dict(data, errors, path):
    if not isinstance(data, dict):
        errors.append((path, f"expected an object, got {type(data).__name__}"))
        return None
    return data


def load_lattice(data) -> Loaded:
    errors = []
    notes = []
    d = _as_dict(data, errors, "lattice")
    if d is None:
        raise SchemaError(errors)
    elements = d.get("elements")
    if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
        errors.append(("lattice.elements", "must be a list of strings"))
    leq = d.get("leq", [])
    if not isinstance(leq, list) or not all(
            isinstance(p, list) and len(p) == 2 for p in leq):
        errors.append(("lattice.leq", "must be a list of [a, b] pairs"))
    if errors:
        raise SchemaError(errors)
    for k, (a, b) in enumerate(leq):
        if a not in elements:
            errors.append((f"lattice.leq[{k}]", f"unknown element {a!r}"))
        if b not in elements:
            errors.append((f"lattice.leq[{k}]", f"unknown element {b!r}"))
    if errors:
        raise SchemaError(errors)
    try:
        lat = make_poset(tuple(elements), [(a, b) for a, b in leq])
    except StructureError as e:
        raise SchemaError([("lattice", str(e))])
    given = {(a, b) for a, b in leq}
    closed = sum(1 for i in range(lat.n) for j in range(lat.n)
                 if lat.leq(i, j) and (lat.elements[i], lat.elements[j]) not in given)
    if closed:
        notes.append(f"leq closed reflexively-transitively: {closed} pairs added")
    return Loaded(lat, notes)


def dump_lattice(lat: FinLattice) -> dict:
    pairs = [[lat.elements[i], lat.elements[j]] for i in range(lat.n)
             for j in range(lat.n) if i != j and lat.leq(i, j)]
    return {"elements": list(lat.elements), "leq": pairs}


def load_locale(data, cap=None) -> Loaded:
    loaded = load_lattice(data)
    loc = make_locale(loaded.value, cap)
    return Loaded(loc, loaded.notes)


def _point_set(names, index, errors, path):
    mask = 0
    for nm in names:
        if nm not in index:
            errors.append((path, f"unknown point {nm!r}"))
            continue
        mask |= 1 << index[nm]
    return mask


def load_space(data, cap=None) -> Loaded:
    errors = []
    notes = []
    d = _as_dict(data, errors, "space")
    if d is None:
        raise SchemaError(errors)
    points = d.get("points")
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise SchemaError([("space.points", "must be a list of strings")])
    if len(set(points)) != len(points):
        raise SchemaError([("space.points", "duplicate point ids")])
    index = {p: i for i, p in enumerate(points)}
    full = (1 << len(points)) - 1
    if "subbasis" in d:
        sb = [_point_set(s, index, errors, f"space.subbasis[{k}]")
              for k, s in enumerate(d["subbasis"])]
        if errors:
            raise SchemaError(errors)
        return Loaded(generate_topology(tuple(points), sb, cap), notes)
    opens = d.get("opens")
    if not isinstance(opens, list):
        raise SchemaError([("space.opens", "must be a list of point lists")])
    fam = set()
    for k, o in enumerate(opens):
        fam.add(_point_set(o, index, errors, f"space.opens[{k}]"))
    if errors:
        raise SchemaError(errors)
    if 0 not in fam:
        fam.add(0)
        notes.append("empty set added to opens")
    if full not in fam:
        fam.add(full)
        notes.append("full set added to opens")
    added = 0
    changed = True
    while changed:
        changed = False
        for a in list(fam):
            for b in list(fam):
                for c in (a & b, a | b):
                    if c not in fam:
                        fam.add(c)
                        added += 1
                        changed = True
    if added:
        notes.append(f"opens closed under union/intersection: {added} sets added")
    return Loaded(FinSpace(tuple(points),
                           tuple(sorted(fam, key=lambda o: (o.bit_count(), o)))),
                  notes)


def dump_space(space: FinSpace) -> dict:
    return {"points": list(space.points),
            "opens": [space.names(o) for o in space.opens]}


def load_fq(data) -> Loaded:
    errors = []
    notes = []
    d = _as_dict(data, errors, "fq")
    if d is None:
        raise SchemaError(errors)
    q, dim = d.get("q"), d.get("dim")
    if not isinstance(q, int) or not isinstance(dim, int):
        raise SchemaError([("fq", "q and dim must be integers")])
    carrier = d.get("carrier", "discrete")
    try:
        if carrier == "discrete":
            return Loaded(FqSpace(q, dim), notes)
        if carrier == "indiscrete":
            pts = tuple("".join(str(c) for c in v)
                        for v in __import__("itertools").product(range(q), repeat=dim))
            return Loaded(FqSpace(q, dim, indiscrete_space(pts)), notes)
        loaded = load_space(carrier)
        notes.extend(loaded.notes)
        return Loaded(FqSpace(q, dim, loaded.value), notes)
    except StructureError as e:
        raise SchemaError([("fq", str(e))])


def dump_fq(space: FqSpace) -> dict:
    return space.to_json()


def load_subspace(data, q: int, dim: int, path="subspace") -> FqSubspace:
    errors = []
    d = _as_dict(data, errors, path)
    if d is None or not isinstance(d.get("basis"), list):
        raise SchemaError(errors + [(path, "expected {'basis': [vector strings]}")])
    vecs = []
    for k, s in enumerate(d["basis"]):
        try:
            vecs.append(vector_from_str(s, q, dim))
        except StructureError as e:
            errors.append((f"{path}.basis[{k}]", str(e)))
    if errors:
        raise SchemaError(errors)
    return span(q, dim, vecs)


def load_bundle(data, cap=None) -> Loaded:
    errors = []
    notes = []
    d = _as_dict(data, errors, "bundle")
    if d is None:
        raise SchemaError(errors)
    space_l = load_space(d.get("space"), cap)
    fq_l = load_fq(d.get("fq"))
    notes.extend(f"space: {n}" for n in space_l.notes)
    notes.extend(f"fq: {n}" for n in fq_l.notes)
    base, carrier = space_l.value, fq_l.value
    kmap = d.get("kappa")
    if not isinstance(kmap, dict):
        raise SchemaError([("bundle.kappa", "must map point ids to subspaces")])
    kappa = []
    for p in base.points:
        if p not in kmap:
            errors.append(("bundle.kappa", f"missing point {p!r}"))
            continue
        kappa.append(load_subspace(kmap[p], carrier.q, carrier.dim, f"bundle.kappa[{p}]"))
    extra = sorted(set(kmap) - set(base.points))
    if extra:
        errors.append(("bundle.kappa", f"unknown points {extra}"))
    if errors:
        raise SchemaError(errors)
    return Loaded(kernel_bundle(base, carrier, tuple(kappa)), notes)


def dump_bundle(bundle: QVBundle) -> dict:
    return {"space": dump_space(bundle.base), "fq": dump_fq(bundle.carrier),
            "kappa": bundle.kappa_json()}


def load_linloc(data, cap=None) -> Loaded:
    errors = []
    notes = []
    d = _as_dict(data, errors, "linloc")
    if d is None:
        raise SchemaError(errors)
    frame_l = load_locale(d.get("frame"), cap)
    fq_l = load_fq(d.get("fq"))
    notes.extend(f"frame: {n}" for n in frame_l.notes)
    loc, carrier = frame_l.value, fq_l.value
    sigma = d.get("sigma")
    if not isinstance(sigma, dict):
        raise SchemaError([("linloc.sigma", "must map subspace keys to frame elements")])
    sl = enumerate_subspaces(carrier)
    lat = loc.lattice
    for key, val in sigma.items():
        if key not in sl.index_of:
            errors.append((f"linloc.sigma[{key}]", "unknown subspace key"))
        if val not in lat.index:
            errors.append((f"linloc.sigma[{key}]", f"unknown frame element {val!r}"))
    if errors:
        raise SchemaError(errors)
    keys = set(sigma)
    all_keys = set(sl.index_of)
    line_keys = {s.key for s in sl.subspaces if s.dim == 1}
    if keys == all_keys:
        table = tuple(lat.index[sigma[s.key]] for s in sl.subspaces)
        return Loaded(build_linloc(loc, carrier, table, cap), notes)
    if keys == line_keys:
        notes.append("sigma given on lines only; extended by joins and re-verified")
        return Loaded(linloc_from_line_values(loc, carrier, sigma, cap), notes)
    missing = sorted(all_keys - keys)
    raise SchemaError([("linloc.sigma",
                        f"must cover all subspaces or exactly the lines; missing {missing}")])


def dump_linloc(ll: LinLocale) -> dict:
    return {"frame": dump_lattice(ll.frame.lattice), "fq": dump_fq(ll.carrier),
            "sigma": ll.support_json()}


def load_morphism_data(data, src_space: FinSpace, dst_space: FinSpace,
                       q: int, star_source_dim: int, star_target_dim: int) -> Loaded:
    """f_flat as a point assignment, f_star as a matrix (rows over F_q)."""
    errors = []
    d = _as_dict(data, errors, "morphism")
    if d is None:
        raise SchemaError(errors)
    flat = d.get("f_flat")
    if not isinstance(flat, dict):
        errors.append(("morphism.f_flat", "must map source points to target points"))
    star = d.get("f_star")
    if not isinstance(star, list) or not all(isinstance(r, list) for r in star):
        errors.append(("morphism.f_star", "must be a matrix (list of rows)"))
    if errors:
        raise SchemaError(errors)
    table = []
    for p in src_space.points:
        if p not in flat:
            errors.append(("morphism.f_flat", f"missing point {p!r}"))
            continue
        if flat[p] not in dst_space.index:
            errors.append(("morphism.f_flat", f"unknown target point {flat[p]!r}"))
            continue
        table.append(dst_space.index[flat[p]])
    if len(star) != star_target_dim or any(len(r) != star_source_dim for r in star):
        errors.append(("morphism.f_star",
                       f"expected a {star_target_dim}x{star_source_dim} matrix"))
    if errors:
        raise SchemaError(errors)
    fm = FqLinearMap(q, star_source_dim, star_target_dim,
                     tuple(tuple(c % q for c in r) for r in star))
    return Loaded((CtsMap(src_space, dst_space, tuple(table)), fm), [])


def read_json(path: str):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError([(path, f"invalid JSON: {e}")])
