"""Canonical small structures used by tests, scripts, and CLI demos."""

from __future__ import annotations

import random

from .bundle import QVBundle, kernel_bundle
from .frame import Locale, make_locale
from .linfq import FqSpace, FqSubspace, span, zero_subspace, full_subspace
from .linloc import LinLocale, build_linloc
from .order import FinLattice, make_poset
from .space import (FinSpace, discrete_space, generate_topology,
                    indiscrete_space, make_space)


def chain(n: int) -> FinLattice:
    """Total order 0 < 1 < ... < n-1 (ids c0..c(n-1); C3 uses 0 < m < 1)."""
    if n == 3:
        return make_poset(("0", "m", "1"), [("0", "m"), ("m", "1")])
    ids = tuple(f"c{i}" for i in range(n))
    return make_poset(ids, [(ids[i], ids[i + 1]) for i in range(n - 1)])


def boolean_lattice(k: int) -> FinLattice:
    """Powerset of k atoms ordered by inclusion."""
    ids = tuple("{" + ",".join(str(i) for i in range(k) if m >> i & 1) + "}"
                for m in range(1 << k))
    pairs = []
    for a in range(1 << k):
        for b in range(1 << k):
            if a & ~b == 0:
                pairs.append((ids[a], ids[b]))
    return make_poset(ids, pairs)


def diamond_m3() -> FinLattice:
    """Bottom, three incomparable atoms, top: modular but not distributive."""
    return make_poset(("0", "a", "b", "c", "1"),
                      [("0", "a"), ("0", "b"), ("0", "c"),
                       ("a", "1"), ("b", "1"), ("c", "1")])


def pentagon_n5() -> FinLattice:
    return make_poset(("0", "a", "b", "c", "1"),
                      [("0", "a"), ("a", "c"), ("0", "b"), ("c", "1"), ("b", "1")])


def downset_lattice(point_count: int, relation: list[tuple[int, int]]) -> FinLattice:
    """Lattice of down-closed subsets of a poset (always distributive)."""
    up = [1 << i for i in range(point_count)]
    for a, b in relation:
        up[a] |= 1 << b
    changed = True
    while changed:
        changed = False
        for i in range(point_count):
            acc = up[i]
            m = up[i]
            while m:
                j = (m & -m).bit_length() - 1
                acc |= up[j]
                m &= m - 1
            if acc != up[i]:
                up[i] = acc
                changed = True
    downsets = []
    for w in range(1 << point_count):
        if all(not (w >> j & 1 and up[i] >> j & 1 and not w >> i & 1)
               for i in range(point_count) for j in range(point_count)):
            downsets.append(w)
    ids = tuple("d" + format(w, f"0{point_count}b") for w in downsets)
    pairs = [(ids[i], ids[j]) for i, a in enumerate(downsets)
             for j, b in enumerate(downsets) if a & ~b == 0]
    return make_poset(ids, pairs)


def random_distributive_lattices(count: int, seed: int = 7,
                                 max_elements: int = 10) -> list[FinLattice]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.choice((2, 3, 3, 4))
        rel = [(i, j) for i in range(n) for j in range(n)
               if i != j and rng.random() < 0.4]
        try:
            lat = downset_lattice(n, rel)
        except Exception:
            continue
        if lat.n <= max_elements:
            out.append(lat)
    return out


def sierpinski() -> FinSpace:
    return generate_topology(("x0", "x1"), [0b10])


def discrete2() -> FinSpace:
    return discrete_space(("y0", "y1"))


def indiscrete2() -> FinSpace:
    return indiscrete_space(("z0", "z1"))


def f2(dim: int = 1) -> FqSpace:
    return FqSpace(2, dim)


def f2_indiscrete(dim: int = 1) -> FqSpace:
    pts = tuple("".join(str(c) for c in v)
                for v in __import__("itertools").product(range(2), repeat=dim))
    return FqSpace(2, dim, indiscrete_space(pts))


def c3_locale() -> Locale:
    return make_locale(chain(3))


def bundle_b1() -> QVBundle:
    """Trivial F2 bundle over the Sierpinski space."""
    a = f2()
    return kernel_bundle(sierpinski(), a, (zero_subspace(2, 1), zero_subspace(2, 1)))


def bundle_b2() -> QVBundle:
    """Kernel grows along the open point: continuous but no open support."""
    a = f2()
    return kernel_bundle(sierpinski(), a, (zero_subspace(2, 1), full_subspace(2, 1)))


def bundle_b3() -> QVBundle:
    a = f2()
    return kernel_bundle(discrete2(), a, (zero_subspace(2, 1), full_subspace(2, 1)))


def bundle_b4() -> QVBundle:
    """Trivial fibers over the indiscrete two-point space: spectral, not sober."""
    a = f2()
    return kernel_bundle(indiscrete2(), a, (zero_subspace(2, 1), zero_subspace(2, 1)))


def linloc_l1() -> LinLocale:
    """Chain frame with the full subspace supported on the top."""
    loc = c3_locale()
    lat = loc.lattice
    return build_linloc(loc, f2(), (lat.index["0"], lat.index["1"]))


def linloc_constant_zero() -> LinLocale:
    loc = c3_locale()
    lat = loc.lattice
    return build_linloc(loc, f2(), (lat.index["0"], lat.index["0"]))


def linloc_rejected_table() -> tuple[Locale, FqSpace, tuple[int, ...]]:
    """Support table whose kernel is not continuous (for negative tests)."""
    loc = c3_locale()
    lat = loc.lattice
    return loc, f2(), (lat.index["0"], lat.index["m"])


def trivial_frame_locale() -> Locale:
    return make_locale(make_poset(("*",), []))
