"""Topologies on the set of subspaces: lower Vietoris, open support, Fell.

Points of these spaces are the canonical subspace keys.  Subbasic sets:
  - tilde(U) = {P : P meets U}, for each carrier open U;
  - check(a) = {P : a not in P}, for each vector a (open support);
  - check(K) = {P : P misses K}, for every subset K (Fell; all subsets of
    a finite space are compact).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .bitsets import bit_indices, is_subset, mask_of
from .caps import check_cap
from .frame import Locale, is_prime
from .linfq import FqSpace, FqSubspace, SubLattice, enumerate_subspaces, span
from .order import LatticeMap, StructureError, verify_adjunction
from .space import FinSpace, generate_topology

KINDS = ("vietoris", "open_support", "fell")


@dataclass(frozen=True)
class SpectrumTopology:
    sub_lattice: SubLattice
    space: FinSpace
    kind: str


def _tilde_sets(sl: SubLattice) -> list[int]:
    """{P : P meets U} for each carrier open U (deduplicated later)."""
    return [mask_of(i for i, m in enumerate(sl.member_masks) if m & u)
            for u in sl.space.carrier_topology.opens]


def _check_vector_sets(sl: SubLattice) -> list[int]:
    full = (1 << sl.n) - 1
    return [full ^ sl.containing(v) for v in sl.space.vectors]


def _check_subset_sets(sl: SubLattice, cap: int | None) -> list[int]:
    carrier_size = sl.space.size
    check_cap("fell subbasis", 1 << carrier_size, cap)
    vi = sl.space.vector_index
    out = []
    for kmask in range(1 << carrier_size):
        out.append(mask_of(i for i, m in enumerate(sl.member_masks) if not m & kmask))
    return out


@lru_cache(maxsize=None)
def spectrum_topology(space: FqSpace, kind: str, cap: int | None = None) -> SpectrumTopology:
    if kind not in KINDS:
        raise ValueError(f"unknown spectrum topology kind {kind!r}")
    sl = enumerate_subspaces(space)
    sb = _tilde_sets(sl)
    if kind == "open_support":
        sb += _check_vector_sets(sl)
    elif kind == "fell":
        sb += _check_subset_sets(sl, cap)
    pts = tuple(s.key for s in sl.subspaces)
    fin = generate_topology(pts, sb, cap)
    return SpectrumTopology(sl, fin, kind)


def upset_topology(sl: SubLattice) -> FinSpace:
    """Alexandrov topology of the inclusion order (oracle for the discrete
    carrier, where lower Vietoris opens are exactly the up-sets)."""
    check_cap("up-set topology", 1 << sl.n)
    lat = sl.lattice
    opens = [w for w in range(1 << sl.n)
             if all(is_subset(lat.up[x], w) for x in bit_indices(w))]
    return FinSpace(tuple(lat.elements),
                    tuple(sorted(opens, key=lambda o: (o.bit_count(), o))))


def is_upward_closed(sl: SubLattice, mask: int) -> bool:
    return all(is_subset(sl.lattice.up[x], mask) for x in bit_indices(mask))


@dataclass(frozen=True)
class UIntervalReport:
    point_mask: int
    is_open: bool
    is_prime: bool | None
    witness: object = None


def u_interval(topology: SpectrumTopology, v1: FqSubspace, v2: FqSubspace) -> UIntervalReport:
    """Complement of the inclusion interval [v1, v2] in the subspace points,
    with a primality verdict in the topology's open lattice when open."""
    from .space import open_locale

    sl = topology.sub_lattice
    if not v2.contains_subspace(v1):
        raise StructureError("u_interval requires v1 contained in v2")
    i1, i2 = sl.index_of[v1.key], sl.index_of[v2.key]
    lat = sl.lattice
    interval = lat.up[i1] & lat.down[i2]
    mask = ((1 << sl.n) - 1) ^ interval
    if not topology.space.is_open(mask):
        return UIntervalReport(mask, False, None)
    loc = open_locale(topology.space)
    ok, witness = is_prime(loc, topology.space.open_id(mask))
    return UIntervalReport(mask, True, ok, witness)


@dataclass(frozen=True)
class TopologyComparison:
    verdict: str  # equal | first_strictly_coarser | second_strictly_coarser | incomparable
    witness_first: int | None = None   # open of the second missing from the first
    witness_second: int | None = None  # open of the first missing from the second


def topology_compare(t1: FinSpace, t2: FinSpace) -> TopologyComparison:
    if t1.points != t2.points:
        raise StructureError("topologies live on different point sets")
    s1, s2 = set(t1.opens), set(t2.opens)
    only2 = sorted(s2 - s1, key=lambda o: (o.bit_count(), o))
    only1 = sorted(s1 - s2, key=lambda o: (o.bit_count(), o))
    if not only1 and not only2:
        return TopologyComparison("equal")
    if not only1:
        return TopologyComparison("first_strictly_coarser", witness_first=only2[0])
    if not only2:
        return TopologyComparison("second_strictly_coarser", witness_second=only1[0])
    return TopologyComparison("incomparable", witness_first=only2[0], witness_second=only1[0])


class UnsupportedCarrier(ValueError):
    """Closure of some subspace is not a subspace, so Max is undefined."""


@dataclass(frozen=True)
class MaxReport:
    closed_indices: tuple[int, ...]     # indices into the sub lattice
    closure_table: tuple[int, ...]      # subspace index -> closed subspace index
    closure_map: LatticeMap             # Sub A -> Max A, left adjoint to inclusion


def max_subspaces(space: FqSpace) -> MaxReport:
    """Carrier-closed subspaces with the closure operator.

    Requires the topological closure of every subspace to be a subspace;
    otherwise the carrier is rejected rather than silently mishandled.
    """
    sl = enumerate_subspaces(space)
    carrier = space.carrier_topology
    closure_of = []
    for i, s in enumerate(sl.subspaces):
        cl_mask = carrier.closure(sl.member_masks[i])
        j = next((k for k, m in enumerate(sl.member_masks) if m == cl_mask), None)
        if j is None:
            raise UnsupportedCarrier(
                f"closure of {s.key} is not a linear subspace")
        closure_of.append(j)
    closed = tuple(sorted({j for j in closure_of}))
    closed_pos = {j: k for k, j in enumerate(closed)}
    max_lat_up = []
    for j in closed:
        max_lat_up.append(mask_of(closed_pos[k] for k in closed
                                  if is_subset(1 << k, sl.lattice.up[j])))
    from .order import FinLattice

    max_lat = FinLattice(tuple(sl.lattice.elements[j] for j in closed), tuple(max_lat_up))
    closure_map = LatticeMap(sl.lattice, max_lat,
                             tuple(closed_pos[j] for j in closure_of))
    inclusion = LatticeMap(max_lat, sl.lattice, closed)
    ok, witness = verify_adjunction(closure_map, inclusion)
    if not ok:
        raise AssertionError(f"closure not left adjoint to inclusion: {witness}")
    return MaxReport(closed, tuple(closure_of), closure_map)


def restrict_to_max(topology: SpectrumTopology, max_report: MaxReport) -> FinSpace:
    """Subspace topology on the carrier-closed points."""
    sl = topology.sub_lattice
    keep = max_report.closed_indices
    pos = {j: k for k, j in enumerate(keep)}
    pts = tuple(sl.lattice.elements[j] for j in keep)
    opens = set()
    for o in topology.space.opens:
        opens.add(mask_of(pos[j] for j in keep if o >> j & 1))
    return FinSpace(pts, tuple(sorted(opens, key=lambda o: (o.bit_count(), o))))
