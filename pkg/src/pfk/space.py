"""Finite topological spaces and continuous maps.

Opens are int bitmasks over a canonical point list, stored deduplicated
and sorted by (size, value).  Generation from a subbasis goes through
minimal neighborhoods, which for a finite space determine the whole
topology (it is the family of up-sets of the specialization preorder).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

from .bitsets import bit_indices, is_subset, mask_of
from .caps import check_cap, resolve_cap
from .order import FinLattice, LatticeMap, StructureError, verify_adjunction


def _canon_opens(opens) -> tuple[int, ...]:
    return tuple(sorted(set(opens), key=lambda o: (o.bit_count(), o)))


@dataclass(frozen=True)
class FinSpace:
    points: tuple[str, ...]
    opens: tuple[int, ...]
    subbasis: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise StructureError("duplicate point ids")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @cached_property
    def open_set(self) -> frozenset[int]:
        return frozenset(self.opens)

    def is_open(self, mask: int) -> bool:
        return mask in self.open_set

    @cached_property
    def min_nbhd(self) -> tuple[int, ...]:
        """Smallest open around each point (finite intersections of opens are open)."""
        out = []
        for x in range(self.n):
            acc = self.full_mask
            for o in self.opens:
                if o >> x & 1:
                    acc &= o
            out.append(acc)
        return tuple(out)

    @cached_property
    def spec_up(self) -> tuple[int, ...]:
        """spec_up[x] = {y : x below y}, where x below y iff every open
        containing x contains y (iff x in cl{y})."""
        return self.min_nbhd

    def closure(self, mask: int) -> int:
        out = 0
        for z in range(self.n):
            if self.min_nbhd[z] & mask:
                out |= 1 << z
        return out

    def interior(self, mask: int) -> int:
        out = 0
        for x in bit_indices(mask):
            if is_subset(self.min_nbhd[x], mask):
                out |= 1 << x
        return out

    def names(self, mask: int) -> list[str]:
        return [self.points[i] for i in bit_indices(mask)]

    def open_id(self, mask: int) -> str:
        return "{" + ",".join(self.names(mask)) + "}"

    def to_json(self):
        d = {"points": list(self.points), "opens": [self.names(o) for o in self.opens]}
        if self.subbasis is not None:
            d["subbasis"] = [self.names(s) for s in self.subbasis]
        return d


def make_space(points, opens, subbasis=None) -> FinSpace:
    """Validated construction: requires an actual topology."""
    pts = tuple(points)
    ops = _canon_opens(opens)
    full = (1 << len(pts)) - 1
    fam = set(ops)
    if 0 not in fam or full not in fam:
        raise StructureError("opens must contain the empty set and the whole space")
    for a in ops:
        for b in ops:
            if a & b not in fam or a | b not in fam:
                raise StructureError("opens not closed under intersection/union")
    sb = _canon_opens(subbasis) if subbasis is not None else None
    return FinSpace(pts, ops, sb)


def generate_topology(points, subbasis, cap: int | None = None) -> FinSpace:
    """Smallest topology containing the subbasis; records the subbasis."""
    pts = tuple(points)
    n = len(pts)
    full = (1 << n) - 1
    sb = []
    for s in subbasis:
        if s & ~full:
            raise StructureError("subbasis set mentions an out-of-range point")
        sb.append(s)
    check_cap("topology generation", 1 << n, cap)
    nbhd = []
    for x in range(n):
        acc = full
        for s in sb:
            if s >> x & 1:
                acc &= s
        nbhd.append(acc)
    opens = []
    for w in range(1 << n):
        good = True
        for x in bit_indices(w):
            if not is_subset(nbhd[x], w):
                good = False
                break
        if good:
            opens.append(w)
    return FinSpace(pts, _canon_opens(opens), _canon_opens(sb))


def discrete_space(points) -> FinSpace:
    pts = tuple(points)
    check_cap("discrete topology", 1 << len(pts))
    return FinSpace(pts, _canon_opens(range(1 << len(pts))))


def indiscrete_space(points) -> FinSpace:
    pts = tuple(points)
    return FinSpace(pts, (0, (1 << len(pts)) - 1))


def closure_interior(space: FinSpace, subset, which: str):
    mask = subset if isinstance(subset, int) else mask_of(space.index[p] for p in subset)
    if which == "closure":
        return space.closure(mask)
    if which == "interior":
        return space.interior(mask)
    raise ValueError(f"which must be closure or interior, not {which!r}")


@dataclass(frozen=True)
class CtsMap:
    source: FinSpace
    target: FinSpace
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.n:
            raise StructureError("point map not total")
        if any(not 0 <= v < self.target.n for v in self.table):
            raise StructureError("point map hits unknown target point")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def preimage(self, mask: int) -> int:
        return mask_of(x for x in range(self.source.n) if mask >> self.table[x] & 1)

    def image(self, mask: int) -> int:
        return mask_of(self.table[x] for x in bit_indices(mask))

    def compose(self, other: "CtsMap") -> "CtsMap":
        """self o other (apply other first)."""
        if other.target != self.source:
            raise StructureError("composition source/target mismatch")
        return CtsMap(other.source, self.target, tuple(self.table[v] for v in other.table))

    def is_surjective(self) -> bool:
        return set(self.table) == set(range(self.target.n))

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def to_json(self):
        return {self.source.points[x]: self.target.points[v] for x, v in enumerate(self.table)}


def point_map(source: FinSpace, target: FinSpace, assignment: dict[str, str]) -> CtsMap:
    table = []
    for p in source.points:
        if p not in assignment:
            raise StructureError(f"point map not total: missing {p!r}")
        v = assignment[p]
        if v not in target.index:
            raise StructureError(f"point map value {v!r} not a target point")
        table.append(target.index[v])
    return CtsMap(source, target, tuple(table))


def identity_cts(space: FinSpace) -> CtsMap:
    return CtsMap(space, space, tuple(range(space.n)))


def check_continuous(f: CtsMap):
    """(ok, witness open mask in the target)."""
    for o in f.target.opens:
        if not f.source.is_open(f.preimage(o)):
            return False, o
    return True, None


def check_open_map(f: CtsMap):
    for o in f.source.opens:
        if not f.target.is_open(f.image(o)):
            return False, o
    return True, None


@dataclass(frozen=True)
class SeparationReport:
    t0: bool
    t1: bool
    sober: bool
    specialization: tuple[int, ...]  # spec_up masks

    def to_json(self, space: FinSpace):
        return {"T0": self.t0, "T1": self.t1, "sober": self.sober,
                "specialization": {space.points[x]: space.names(up)
                                   for x, up in enumerate(self.specialization)}}


def separation_report(space: FinSpace) -> SeparationReport:
    up = space.spec_up
    t0 = all(not (up[x] >> y & 1 and up[y] >> x & 1) for x in range(space.n)
             for y in range(space.n) if x != y)
    t1 = all(up[x] == 1 << x for x in range(space.n))
    sob, _, _ = soberify(space)
    sober = sob.is_injective() and sob.is_surjective()
    return SeparationReport(t0, t1, sober, up)


@lru_cache(maxsize=None)
def open_locale(space: FinSpace):
    """The topology as a frame; element ids render the open sets."""
    from .frame import make_locale

    n_opens = len(space.opens)
    check_cap("open locale", n_opens * n_opens)
    ids = tuple(space.open_id(o) for o in space.opens)
    up = []
    for a in space.opens:
        up.append(mask_of(j for j, b in enumerate(space.opens) if is_subset(a, b)))
    lat = FinLattice(ids, tuple(up))
    # a topology is a frame: finite meets are intersections and they
    # distribute over unions, so validate with the equivalent binary scan
    return make_locale(lat, fast=True)


@lru_cache(maxsize=None)
def soberify(space: FinSpace):
    """sob(x) = complement of cl{x}, into the spectrum of the open locale.

    Returns (CtsMap, surjective, open_map); if surjective it must be open
    and this is asserted.
    """
    from .frame import spectrum_space

    loc = open_locale(space)
    sigma = spectrum_space(loc)
    prime_index = {loc.lattice.elements[p]: k for k, p in enumerate(loc.primes)}
    table = []
    for x in range(space.n):
        o = space.full_mask ^ space.closure(1 << x)
        key = space.open_id(o)
        if key not in prime_index:
            raise AssertionError(f"sob({space.points[x]}) is not a prime open")
        table.append(prime_index[key])
    sob = CtsMap(space, sigma, tuple(table))
    ok, witness = check_continuous(sob)
    if not ok:
        raise AssertionError(f"soberification not continuous at open {witness}")
    surj = sob.is_surjective()
    if surj:
        open_ok, w = check_open_map(sob)
        if not open_ok:
            raise AssertionError(f"surjective soberification not open at {w}")
    else:
        open_ok, _ = check_open_map(sob)
    return sob, surj, open_ok


def direct_image(f: CtsMap) -> LatticeMap:
    """phi_!(U) = phi(U) for an open map, left adjoint to the preimage map."""
    ok, w = check_open_map(f)
    if not ok:
        raise StructureError(f"direct image needs an open map; witness open {f.source.names(w)}")
    src = open_locale(f.source).lattice
    tgt = open_locale(f.target).lattice
    table = tuple(tgt.index[f.target.open_id(f.image(o))] for o in f.source.opens)
    fwd = LatticeMap(src, tgt, table)
    pre = LatticeMap(tgt, src, tuple(src.index[f.source.open_id(f.preimage(o))]
                                     for o in f.target.opens))
    ok, witness = verify_adjunction(fwd, pre)
    if not ok:
        raise AssertionError(f"direct image not left adjoint to preimage: {witness}")
    return fwd


def product_space(a: FinSpace, b: FinSpace, cap: int | None = None) -> FinSpace:
    """Product topology, generated by open rectangles."""
    pts = tuple(f"({p},{q})" for p in a.points for q in b.points)
    nb = len(b.points)
    sb = []
    for u in a.opens:
        sb.append(mask_of(x * nb + y for x in bit_indices(u) for y in range(nb)))
    for v in b.opens:
        sb.append(mask_of(x * nb + y for x in range(a.n) for y in bit_indices(v)))
    return generate_topology(pts, sb, cap)


def quotient_space(space: FinSpace, new_points, table, cap: int | None = None) -> FinSpace:
    """Quotient topology along a surjective point map."""
    pts = tuple(new_points)
    t = tuple(table)
    if set(t) != set(range(len(pts))):
        raise StructureError("quotient map must be surjective")
    check_cap("quotient topology", 1 << len(pts), cap)
    opens = []
    for w in range(1 << len(pts)):
        pre = mask_of(x for x in range(space.n) if w >> t[x] & 1)
        if space.is_open(pre):
            opens.append(w)
    return FinSpace(pts, _canon_opens(opens))


def derived_space(kind: str, *args, cap: int | None = None) -> FinSpace:
    if kind == "product":
        return product_space(*args, cap=cap)
    if kind == "quotient":
        return quotient_space(*args, cap=cap)
    raise ValueError(f"unknown derived space kind {kind!r}")


def enumerate_topologies(n: int, cap: int | None = None) -> list[FinSpace]:
    """All topologies on n labeled points, via their specialization preorders.

    Finite topologies are exactly the up-set families of preorders, so we
    scan the 2^(n(n-1)) reflexive relations for transitive ones.
    """
    check_cap("topology enumeration", 1 << (n * (n - 1)), cap)
    pts = tuple(f"p{i}" for i in range(n))
    offdiag = [(i, j) for i in range(n) for j in range(n) if i != j]
    spaces = []
    for bits in product((0, 1), repeat=len(offdiag)):
        up = [1 << i for i in range(n)]
        for (i, j), b in zip(offdiag, bits):
            if b:
                up[i] |= 1 << j
        ok = True
        for i in range(n):
            for j in bit_indices(up[i]):
                if not is_subset(up[j], up[i]):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        opens = [w for w in range(1 << n)
                 if all(is_subset(up[x], w) for x in bit_indices(w))]
        spaces.append(FinSpace(pts, _canon_opens(opens)))
    return spaces
