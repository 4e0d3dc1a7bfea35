"""Locales: frames, prime elements, spectra, spatialization, locale maps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

from .bitsets import bit_indices, mask_of
from .caps import check_cap, resolve_cap
from .order import (CheckResult, FinLattice, LatticeMap, StructureError,
                    adjoint, map_props, preserves_all_joins,
                    preserves_finite_meets, validate_lattice, verify_adjunction)
from .space import CtsMap, FinSpace, check_continuous


class FrameError(ValueError):
    """The candidate lattice is not a frame (or the map not a frame hom)."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Locale:
    lattice: FinLattice

    @cached_property
    def primes(self) -> tuple[int, ...]:
        """Prime elements in canonical element order, by pairwise scan."""
        lat = self.lattice
        out = []
        for p in range(lat.n):
            ok, _ = _prime_witness(lat, p)
            if ok:
                out.append(p)
        return tuple(out)

    def to_json(self):
        return {"elements": list(self.lattice.elements)}


def _prime_witness(lat: FinLattice, p: int):
    if p == lat.top:
        return False, {"reason": "p is the top element"}
    mt = lat.meet_table
    for a in range(lat.n):
        for b in range(lat.n):
            if lat.leq(mt[a][b], p) and not lat.leq(a, p) and not lat.leq(b, p):
                return False, {"a": lat.elements[a], "b": lat.elements[b]}
    return True, None


def make_locale(lat: FinLattice, cap: int | None = None, fast: bool = False) -> Locale:
    """Frame-validate and wrap.

    fast=True uses the binary distributivity scan, equivalent on finite
    lattices to the arbitrary-join law (joins are folds of binary joins);
    used for topologies, which are frames by construction.
    """
    if fast:
        rep = validate_lattice(lat, "suplattice", cap=1 << lat.n if lat.n <= 20 else 0)
        bad = [c for c in rep.checks if c.status == "fail"]
        if bad:
            raise FrameError(f"not a sup-lattice: {bad[0].to_json()}", rep)
        from .order import _binary_distributivity_witness

        w = _binary_distributivity_witness(lat)
        if w is not None:
            raise FrameError(f"not a frame: {w}", rep)
        return Locale(lat)
    rep = validate_lattice(lat, "frame", cap)
    if not rep.ok:
        bad = rep.failed[0] if rep.failed else rep.checks[-1]
        raise FrameError(f"frame validation failed: {bad.to_json()}", rep)
    return Locale(lat)


def primes(loc: Locale) -> list[str]:
    return [loc.lattice.elements[p] for p in loc.primes]


def is_prime(loc: Locale, element: str):
    lat = loc.lattice
    if element not in lat.index:
        raise StructureError(f"unknown element {element!r}")
    return _prime_witness(lat, lat.index[element])


@lru_cache(maxsize=None)
def spectrum_space(loc: Locale) -> FinSpace:
    """Points are the primes; opens are the sets U_a = {p : a not<= p}.

    The three topology laws (top, binary meets, arbitrary joins) hold by
    construction and are re-asserted here; the join law is re-checked in
    its binary form, which generates the full law over fold joins.
    """
    lat = loc.lattice
    prs = loc.primes
    pos = {p: k for k, p in enumerate(prs)}
    u = [mask_of(pos[p] for p in prs if not lat.leq(a, p)) for a in range(lat.n)]
    if lat.top is None or u[lat.top] != (1 << len(prs)) - 1:
        raise AssertionError("spectrum law U_1 = all primes failed")
    mt, jt = lat.meet_table, lat.join_table
    for a in range(lat.n):
        for b in range(lat.n):
            if u[mt[a][b]] != u[a] & u[b]:
                raise AssertionError("spectrum law U_{a/\\b} = U_a n U_b failed")
            if u[jt[a][b]] != u[a] | u[b]:
                raise AssertionError("spectrum law U_{a\\/b} = U_a u U_b failed")
    if lat.bottom is None or u[lat.bottom] != 0:
        raise AssertionError("spectrum law U_0 = empty failed")
    pts = tuple(lat.elements[p] for p in prs)
    return FinSpace(pts, tuple(sorted(set(u), key=lambda o: (o.bit_count(), o))))


def spectrum_join_law_full(loc: Locale, cap: int | None = None) -> CheckResult:
    """Brute subset form of U_{\\/ S} = union of U_a, cap-guarded."""
    lat = loc.lattice
    cap = resolve_cap(cap)
    if (1 << lat.n) > cap:
        return CheckResult("spectrum join law (all subsets)", "unverified",
                           {"reason": f"2^{lat.n} exceeds cap {cap}"})
    prs = loc.primes
    pos = {p: k for k, p in enumerate(prs)}
    u = [mask_of(pos[p] for p in prs if not lat.leq(a, p)) for a in range(lat.n)]
    joins = lat.subset_joins
    unions = [0] * (1 << lat.n)
    for m in range(1, 1 << lat.n):
        low = (m & -m).bit_length() - 1
        unions[m] = unions[m & (m - 1)] | u[low]
    for m in range(1 << lat.n):
        if u[joins[m]] != unions[m]:
            return CheckResult("spectrum join law (all subsets)", "fail",
                               {"subset": lat.ids(m)})
    return CheckResult("spectrum join law (all subsets)", "pass")


@dataclass(frozen=True)
class Spatialization:
    assignment: LatticeMap  # a |-> U_a, from the frame into the spectrum topology
    is_spatial: bool


def spatialization(loc: Locale) -> Spatialization:
    from .space import open_locale

    sigma = spectrum_space(loc)
    tgt = open_locale(sigma).lattice
    lat = loc.lattice
    prs = loc.primes
    pos = {p: k for k, p in enumerate(prs)}
    table = []
    for a in range(lat.n):
        ua = mask_of(pos[p] for p in prs if not lat.leq(a, p))
        table.append(tgt.index[sigma.open_id(ua)])
    f = LatticeMap(lat, tgt, tuple(table))
    props = map_props(f)
    if not (props.join_preserving and props.finite_meet_preserving):
        raise AssertionError(f"spatialization is not a frame homomorphism: {props.witnesses}")
    injective = len(set(table)) == lat.n
    surjective = len(set(table)) == tgt.n
    return Spatialization(f, injective and surjective)


@dataclass(frozen=True)
class LocaleMap:
    """A map of locales source -> target, carried by its inverse image
    homomorphism target.lattice -> source.lattice."""

    source: Locale
    target: Locale
    inverse_image: LatticeMap

    @cached_property
    def direct_image(self) -> LatticeMap:
        return adjoint(self.inverse_image, "right_of_join_preserving")


def make_locale_map(source: Locale, target: Locale, inverse_table: tuple[int, ...],
                    cap: int | None = None) -> LocaleMap:
    inv = LatticeMap(target.lattice, source.lattice, tuple(inverse_table))
    ok, w = preserves_all_joins(inv, cap)
    if not ok:
        raise FrameError(f"inverse image does not preserve joins: {w}")
    ok, w = preserves_finite_meets(inv)
    if not ok:
        raise FrameError(f"inverse image does not preserve finite meets: {w}")
    return LocaleMap(source, target, inv)


def identity_locale_map(loc: Locale) -> LocaleMap:
    from .order import identity_map

    return LocaleMap(loc, loc, identity_map(loc.lattice))


def spectrum_map(f: LocaleMap) -> CtsMap:
    """The continuous map of spectra induced by a locale map.

    Sends a prime p of the source to \\/{a : f*(a) <= p}; that value being
    prime is guaranteed by adjointness, and treated as a bug trap here.
    """
    src_lat, tgt_lat = f.source.lattice, f.target.lattice
    src_space = spectrum_space(f.source)
    tgt_space = spectrum_space(f.target)
    tgt_pos = {p: k for k, p in enumerate(f.target.primes)}
    table = []
    for p in f.source.primes:
        mask = mask_of(a for a in range(tgt_lat.n)
                       if src_lat.leq(f.inverse_image.table[a], p))
        img = tgt_lat.join_mask(mask)
        if img not in tgt_pos:
            raise AssertionError(
                f"direct image of prime {src_lat.elements[p]!r} is not prime")
        table.append(tgt_pos[img])
    out = CtsMap(src_space, tgt_space, tuple(table))
    ok, w = check_continuous(out)
    if not ok:
        raise AssertionError(f"spectrum map not continuous at {tgt_space.names(w)}")
    return out


def locale_map_of_cts(f: CtsMap) -> LocaleMap:
    """The topology functor on morphisms: inverse image is the preimage."""
    from .space import open_locale

    src = open_locale(f.source)
    tgt = open_locale(f.target)
    table = tuple(src.lattice.index[f.source.open_id(f.preimage(o))]
                  for o in f.target.opens)
    return make_locale_map(src, tgt, table)


def enumerate_frame_homs(source: FinLattice, target: FinLattice,
                         cap: int | None = None) -> list[LatticeMap]:
    """All join + finite-meet + top preserving maps source -> target."""
    total = target.n ** source.n
    check_cap("frame hom enumeration", total, cap)
    out = []
    for table in product(range(target.n), repeat=source.n):
        f = LatticeMap(source, target, table)
        ok, _ = preserves_finite_meets(f)
        if not ok:
            continue
        jp, _ = preserves_all_joins(f, cap)
        if jp:
            out.append(f)
    return out
