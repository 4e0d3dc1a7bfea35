"""Finite posets, sup-lattices, monotone maps, and Galois adjunctions.

Elements are indices into a canonical ordered list of string ids; the
order relation is a tuple of int bitmasks (one upward cone per element),
so order queries are O(1) and iteration is deterministic.  Subset scans
(join preservation, distributivity) run over all 2^n subsets with a
low-bit dynamic program, guarded by the evaluation cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .bitsets import bit_indices, is_subset, mask_of
from .caps import CapExceeded, check_cap, resolve_cap

HARD_TABLE_LIMIT = 4096  # join/meet tables are quadratic; nothing here needs more


class StructureError(ValueError):
    """Malformed order data: duplicate ids, non-antisymmetric relation, ..."""


class PreservationError(ValueError):
    """A map fails the preservation property required of it."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class FinLattice:
    """Finite partial order under a bitmask relation.

    The name is aspirational: instances are plain posets until
    ``validate_lattice`` has certified the sup-lattice / frame axioms.
    ``up[i]`` is the bitmask of elements j with i <= j.
    """

    elements: tuple[str, ...]
    up: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def down(self) -> tuple[int, ...]:
        cols = [0] * self.n
        for i, row in enumerate(self.up):
            for j in bit_indices(row):
                cols[j] |= 1 << i
        return tuple(cols)

    def leq(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    @cached_property
    def bottom(self) -> int | None:
        for i in range(self.n):
            if self.up[i] == self.full_mask:
                return i
        return None

    @cached_property
    def top(self) -> int | None:
        for i in range(self.n):
            if self.down[i] == self.full_mask:
                return i
        return None

    def least_of(self, mask: int) -> int | None:
        """Minimum element of the subset, if it has one."""
        for i in bit_indices(mask):
            if is_subset(mask, self.up[i]):
                return i
        return None

    def greatest_of(self, mask: int) -> int | None:
        for i in bit_indices(mask):
            if is_subset(mask, self.down[i]):
                return i
        return None

    def join_pair(self, i: int, j: int) -> int | None:
        return self.least_of(self.up[i] & self.up[j])

    def meet_pair(self, i: int, j: int) -> int | None:
        return self.greatest_of(self.down[i] & self.down[j])

    @cached_property
    def join_table(self) -> tuple[tuple[int, ...], ...]:
        return self._pair_table(self.join_pair, "join")

    @cached_property
    def meet_table(self) -> tuple[tuple[int, ...], ...]:
        return self._pair_table(self.meet_pair, "meet")

    def _pair_table(self, op, what) -> tuple[tuple[int, ...], ...]:
        if self.n > HARD_TABLE_LIMIT:
            raise CapExceeded(f"{what} table", self.n * self.n, HARD_TABLE_LIMIT**2)
        rows = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                v = op(i, j)
                if v is None:
                    raise StructureError(
                        f"no {what} for ({self.elements[i]!r}, {self.elements[j]!r})"
                    )
                row.append(v)
            rows.append(tuple(row))
        return tuple(rows)

    def join_mask(self, mask: int) -> int:
        if self.bottom is None:
            raise StructureError("no bottom element")
        acc = self.bottom
        table = self.join_table
        for i in bit_indices(mask):
            acc = table[acc][i]
        return acc

    def meet_mask(self, mask: int) -> int:
        if self.top is None:
            raise StructureError("no top element")
        acc = self.top
        table = self.meet_table
        for i in bit_indices(mask):
            acc = table[acc][i]
        return acc

    @cached_property
    def subset_joins(self) -> tuple[int, ...]:
        """join of every subset mask, by low-bit DP; needs n <= 20."""
        check_cap("subset join table", 1 << self.n, 1 << 20)
        if self.bottom is None:
            raise StructureError("no bottom element")
        table = self.join_table
        out = [self.bottom] * (1 << self.n)
        for m in range(1, 1 << self.n):
            low = (m & -m).bit_length() - 1
            out[m] = table[out[m & (m - 1)]][low]
        return tuple(out)

    @cached_property
    def subset_meets(self) -> tuple[int, ...]:
        check_cap("subset meet table", 1 << self.n, 1 << 20)
        if self.top is None:
            raise StructureError("no top element")
        table = self.meet_table
        out = [self.top] * (1 << self.n)
        for m in range(1, 1 << self.n):
            low = (m & -m).bit_length() - 1
            out[m] = table[out[m & (m - 1)]][low]
        return tuple(out)

    def ids(self, mask: int) -> list[str]:
        return [self.elements[i] for i in bit_indices(mask)]


def make_poset(elements: Iterable[str], leq_pairs: Iterable[tuple[str, str]]) -> FinLattice:
    """Build a FinLattice container from raw pairs.

    Closes the relation reflexively and transitively; duplicate ids and
    antisymmetry violations are structural errors, distinct from lattice
    axiom failures reported by validate_lattice.
    """
    elems = tuple(elements)
    if len(set(elems)) != len(elems):
        dupes = sorted({e for e in elems if list(elems).count(e) > 1})
        raise StructureError(f"duplicate element ids: {dupes}")
    idx = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    up = [1 << i for i in range(n)]
    for a, b in leq_pairs:
        if a not in idx or b not in idx:
            raise StructureError(f"leq pair ({a!r}, {b!r}) mentions unknown element")
        up[idx[a]] |= 1 << idx[b]
    # transitive closure (Warshall over bitmask rows)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = up[i]
            for j in bit_indices(up[i]):
                acc |= up[j]
            if acc != up[i]:
                up[i] = acc
                changed = True
    for i in range(n):
        for j in bit_indices(up[i]):
            if i != j and up[j] >> i & 1:
                raise StructureError(
                    f"relation not antisymmetric: {elems[i]!r} <= {elems[j]!r} <= {elems[i]!r}"
                )
    return FinLattice(elems, tuple(up))


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "unverified"
    witness: object = None

    def to_json(self):
        d = {"check": self.name, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass(frozen=True)
class ValidationReport:
    level: str
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def failed(self) -> tuple[CheckResult, ...]:
        return tuple(c for c in self.checks if c.status == "fail")

    def to_json(self):
        return {"level": self.level, "ok": self.ok, "checks": [c.to_json() for c in self.checks]}


LEVELS = ("poset", "suplattice", "frame")


def validate_lattice(lat: FinLattice, level: str = "suplattice", cap: int | None = None) -> ValidationReport:
    """Check order axioms up to the requested level, with witnesses.

    Frame level enumerates a /\\ \\/B = \\/(a /\\ B) over all elements a and
    all subsets B; past the cap the verdict is an explicit "unverified"
    (backed by the pairwise form), never a silent pass.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    cap = resolve_cap(cap)
    checks: list[CheckResult] = []
    n = lat.n

    refl = all(lat.up[i] >> i & 1 for i in range(n))
    checks.append(CheckResult("reflexive", "pass" if refl else "fail"))
    anti = _antisymmetry_witness(lat)
    checks.append(CheckResult("antisymmetric", "pass" if anti is None else "fail", anti))
    trans = _transitivity_witness(lat)
    checks.append(CheckResult("transitive", "pass" if trans is None else "fail", trans))
    if level == "poset" or not (refl and anti is None and trans is None):
        return ValidationReport(level, tuple(checks))

    checks.append(_bound_check(lat, "bottom"))
    checks.append(_bound_check(lat, "top"))
    pair = _pair_bound_witness(lat)
    checks.append(CheckResult("pairwise joins and meets", "pass" if pair is None else "fail", pair))
    if any(c.status == "fail" for c in checks):
        return ValidationReport(level, tuple(checks))

    checks.append(_subset_bound_check(lat, cap))
    if level == "suplattice":
        return ValidationReport(level, tuple(checks))

    checks.append(_distributivity_check(lat, cap))
    return ValidationReport(level, tuple(checks))


def _antisymmetry_witness(lat: FinLattice):
    for i in range(lat.n):
        for j in bit_indices(lat.up[i]):
            if i != j and lat.up[j] >> i & 1:
                return {"a": lat.elements[i], "b": lat.elements[j]}
    return None


def _transitivity_witness(lat: FinLattice):
    for i in range(lat.n):
        for j in bit_indices(lat.up[i]):
            if not is_subset(lat.up[j], lat.up[i]):
                k = next(bit_indices(lat.up[j] & ~lat.up[i]))
                return {"a": lat.elements[i], "b": lat.elements[j], "c": lat.elements[k]}
    return None


def _bound_check(lat: FinLattice, which: str) -> CheckResult:
    found = lat.bottom if which == "bottom" else lat.top
    return CheckResult(f"{which} exists", "pass" if found is not None else "fail")


def _pair_bound_witness(lat: FinLattice):
    for i in range(lat.n):
        for j in range(i, lat.n):
            if lat.join_pair(i, j) is None:
                return {"kind": "join", "a": lat.elements[i], "b": lat.elements[j]}
            if lat.meet_pair(i, j) is None:
                return {"kind": "meet", "a": lat.elements[i], "b": lat.elements[j]}
    return None


def _subset_bound_check(lat: FinLattice, cap: int) -> CheckResult:
    # With pairwise bounds verified, folding is a genuine lub/glb at each
    # step, so the scan amounts to re-asserting the fold is a bound and
    # the least/greatest such.  Beyond the cap: unverified.
    if (1 << lat.n) > cap:
        return CheckResult("all subsets have join and meet", "unverified",
                           {"reason": f"2^{lat.n} subsets exceeds cap {cap}"})
    joins = lat.subset_joins
    meets = lat.subset_meets
    ub = [lat.full_mask] * (1 << lat.n)
    lb = [lat.full_mask] * (1 << lat.n)
    for m in range(1, 1 << lat.n):
        low = (m & -m).bit_length() - 1
        ub[m] = ub[m & (m - 1)] & lat.up[low]
        lb[m] = lb[m & (m - 1)] & lat.down[low]
    for m in range(1 << lat.n):
        j, w = joins[m], meets[m]
        if not (ub[m] >> j & 1 and is_subset(ub[m], lat.up[j])):
            return CheckResult("all subsets have join and meet", "fail",
                               {"kind": "join", "subset": lat.ids(m)})
        if not (lb[m] >> w & 1 and is_subset(lb[m], lat.down[w])):
            return CheckResult("all subsets have join and meet", "fail",
                               {"kind": "meet", "subset": lat.ids(m)})
    return CheckResult("all subsets have join and meet", "pass")


def _distributivity_check(lat: FinLattice, cap: int) -> CheckResult:
    name = "meet distributes over arbitrary joins"
    n = lat.n
    full = n * (1 << n)
    if full > cap:
        w = _binary_distributivity_witness(lat)
        if w is not None:
            return CheckResult(name, "fail", w)
        return CheckResult(name, "unverified",
                           {"reason": f"{n}*2^{n} evaluations exceeds cap {cap}",
                            "binary_scan": "pass"})
    joins = lat.subset_joins
    jt, mt = lat.join_table, lat.meet_table
    for a in range(n):
        meet_a = mt[a]
        # rhs[m] = \/ { a /\ b : b in m }
        rhs = [lat.bottom] * (1 << n)
        for m in range(1, 1 << n):
            low = (m & -m).bit_length() - 1
            rhs[m] = jt[rhs[m & (m - 1)]][meet_a[low]]
        for m in range(1 << n):
            lhs = meet_a[joins[m]]
            if lhs != rhs[m]:
                return CheckResult(name, "fail", {
                    "a": lat.elements[a], "B": lat.ids(m),
                    "lhs": lat.elements[lhs], "rhs": lat.elements[rhs[m]]})
    return CheckResult(name, "pass")


def _binary_distributivity_witness(lat: FinLattice):
    jt, mt = lat.join_table, lat.meet_table
    for a in range(lat.n):
        for b in range(lat.n):
            for c in range(lat.n):
                lhs = mt[a][jt[b][c]]
                rhs = jt[mt[a][b]][mt[a][c]]
                if lhs != rhs:
                    return {"a": lat.elements[a], "B": [lat.elements[b], lat.elements[c]],
                            "lhs": lat.elements[lhs], "rhs": lat.elements[rhs]}
    return None


def join_meet(lat: FinLattice, subset: Iterable[str], which: str) -> str:
    """Least upper / greatest lower bound of a set of element ids."""
    if which not in ("join", "meet"):
        raise ValueError(f"which must be join or meet, not {which!r}")
    mask = 0
    for e in subset:
        if e not in lat.index:
            raise StructureError(f"unknown element id {e!r}")
        mask |= 1 << lat.index[e]
    i = lat.join_mask(mask) if which == "join" else lat.meet_mask(mask)
    return lat.elements[i]


@dataclass(frozen=True)
class LatticeMap:
    source: FinLattice
    target: FinLattice
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != self.source.n:
            raise StructureError("map table is not total on the source")
        if any(not 0 <= v < self.target.n for v in self.table):
            raise StructureError("map table hits an unknown target element")

    def __call__(self, i: int) -> int:
        return self.table[i]

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """self o other (apply other first)."""
        if other.target is not self.source and other.target != self.source:
            raise StructureError("composition source/target mismatch")
        return LatticeMap(other.source, self.target, tuple(self.table[v] for v in other.table))

    def is_identity(self) -> bool:
        return self.source == self.target and self.table == tuple(range(self.source.n))

    def to_json(self):
        return {self.source.elements[i]: self.target.elements[v] for i, v in enumerate(self.table)}


def identity_map(lat: FinLattice) -> LatticeMap:
    return LatticeMap(lat, lat, tuple(range(lat.n)))


def lattice_map(source: FinLattice, target: FinLattice, assignment: dict[str, str]) -> LatticeMap:
    table = []
    for e in source.elements:
        if e not in assignment:
            raise StructureError(f"map not total: missing {e!r}")
        v = assignment[e]
        if v not in target.index:
            raise StructureError(f"map value {v!r} not a target element")
        table.append(target.index[v])
    return LatticeMap(source, target, tuple(table))


def is_monotone(f: LatticeMap):
    for i in range(f.source.n):
        for j in bit_indices(f.source.up[i]):
            if not f.target.leq(f.table[i], f.table[j]):
                return {"a": f.source.elements[i], "b": f.source.elements[j]}
    return None


def _image_fold(f: LatticeMap, table, start) -> list[int]:
    out = [start] * (1 << f.source.n)
    for m in range(1, 1 << f.source.n):
        low = (m & -m).bit_length() - 1
        out[m] = table[out[m & (m - 1)]][f.table[low]]
    return out


def preserves_all_joins(f: LatticeMap, cap: int | None = None):
    """(verdict, witness): verdict None means the scan exceeded the cap."""
    cap = resolve_cap(cap)
    if (1 << f.source.n) > cap:
        return None, None
    joins = f.source.subset_joins
    img = _image_fold(f, f.target.join_table, f.target.bottom)
    for m in range(1 << f.source.n):
        if f.table[joins[m]] != img[m]:
            return False, {"subset": f.source.ids(m),
                           "f(join)": f.target.elements[f.table[joins[m]]],
                           "join(f)": f.target.elements[img[m]]}
    return True, None


def preserves_all_meets(f: LatticeMap, cap: int | None = None):
    cap = resolve_cap(cap)
    if (1 << f.source.n) > cap:
        return None, None
    meets = f.source.subset_meets
    img = _image_fold(f, f.target.meet_table, f.target.top)
    for m in range(1 << f.source.n):
        if f.table[meets[m]] != img[m]:
            return False, {"subset": f.source.ids(m),
                           "f(meet)": f.target.elements[f.table[meets[m]]],
                           "meet(f)": f.target.elements[img[m]]}
    return True, None


def preserves_finite_meets(f: LatticeMap):
    """Top and binary meets."""
    if f.source.top is None or f.table[f.source.top] != f.target.top:
        return False, {"subset": [], "reason": "top not preserved"}
    mt_s, mt_t = f.source.meet_table, f.target.meet_table
    for i in range(f.source.n):
        for j in range(i, f.source.n):
            if f.table[mt_s[i][j]] != mt_t[f.table[i]][f.table[j]]:
                return False, {"subset": [f.source.elements[i], f.source.elements[j]]}
    return True, None


@dataclass(frozen=True)
class MapProps:
    monotone: bool
    join_preserving: bool | None
    finite_meet_preserving: bool
    all_meet_preserving: bool | None
    witnesses: dict = field(default_factory=dict, compare=False)

    def to_json(self):
        unv = lambda v: "unverified" if v is None else v
        return {"monotone": self.monotone,
                "join_preserving": unv(self.join_preserving),
                "finite_meet_preserving": self.finite_meet_preserving,
                "all_meet_preserving": unv(self.all_meet_preserving),
                "witnesses": self.witnesses}


def map_props(f: LatticeMap, cap: int | None = None) -> MapProps:
    witnesses = {}
    mono = is_monotone(f)
    if mono:
        witnesses["monotone"] = mono
    jp, jw = preserves_all_joins(f, cap)
    if jw:
        witnesses["join_preserving"] = jw
    fmp, fw = preserves_finite_meets(f)
    if fw:
        witnesses["finite_meet_preserving"] = fw
    amp, aw = preserves_all_meets(f, cap)
    if aw:
        witnesses["all_meet_preserving"] = aw
    return MapProps(mono is None, jp, fmp, amp, witnesses)


def adjoint(f: LatticeMap, side: str = "right_of_join_preserving", cap: int | None = None) -> LatticeMap:
    """Pointwise adjoint: g(b) = \\/{a : f(a) <= b} (dual formula on the left)."""
    if side not in ("right_of_join_preserving", "left_of_meet_preserving"):
        raise ValueError(f"unknown side {side!r}")
    if side == "right_of_join_preserving":
        ok, witness = preserves_all_joins(f, cap)
        if ok is None:
            raise CapExceeded("join preservation scan", 1 << f.source.n, resolve_cap(cap))
        if not ok:
            raise PreservationError("map does not preserve all joins", witness)
        table = []
        for b in range(f.target.n):
            mask = mask_of(a for a in range(f.source.n) if f.target.leq(f.table[a], b))
            table.append(f.source.join_mask(mask))
        return LatticeMap(f.target, f.source, tuple(table))
    ok, witness = preserves_all_meets(f, cap)
    if ok is None:
        raise CapExceeded("meet preservation scan", 1 << f.source.n, resolve_cap(cap))
    if not ok:
        raise PreservationError("map does not preserve all meets", witness)
    table = []
    for b in range(f.target.n):
        mask = mask_of(a for a in range(f.source.n) if f.target.leq(b, f.table[a]))
        table.append(f.source.meet_mask(mask))
    return LatticeMap(f.target, f.source, tuple(table))


def verify_adjunction(f: LatticeMap, g: LatticeMap):
    """Exhaustive f(a) <= b  <=>  a <= g(b); returns (ok, witness)."""
    if f.source != g.target or f.target != g.source:
        raise StructureError("adjunction source/target mismatch")
    for a in range(f.source.n):
        for b in range(f.target.n):
            if f.target.leq(f.table[a], b) != f.source.leq(a, g.table[b]):
                return False, {"a": f.source.elements[a], "b": f.target.elements[b]}
    return True, None


def enumerate_join_preserving_maps(source: FinLattice, target: FinLattice,
                                   cap: int | None = None) -> list[LatticeMap]:
    """All join-preserving maps source -> target, in lexicographic table order.

    A join-preserving map is determined by its values on the elements;
    we scan every table and filter with the full subset DP.
    """
    total = target.n ** source.n
    check_cap("join-preserving map enumeration", total, cap)
    out = []
    from itertools import product
    for table in product(range(target.n), repeat=source.n):
        f = LatticeMap(source, target, table)
        ok, _ = preserves_all_joins(f, cap)
        if ok:
            out.append(f)
    return out
