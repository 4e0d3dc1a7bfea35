"""Graphviz DOT exports: Hasse diagrams, specialization diagrams, kernel maps."""

from __future__ import annotations

from .bitsets import bit_indices
from .bundle import QVBundle
from .order import FinLattice
from .space import FinSpace


def _quote(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def cover_edges(n: int, up: tuple[int, ...]) -> list[tuple[int, int]]:
    """Transitive reduction of a partial order given as upward masks."""
    out = []
    for i in range(n):
        for j in bit_indices(up[i]):
            if j == i:
                continue
            between = any(k != i and k != j and up[i] >> k & 1 and up[k] >> j & 1
                          for k in range(n))
            if not between:
                out.append((i, j))
    return out


def lattice_dot(lat: FinLattice, name: str = "lattice") -> str:
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for e in lat.elements:
        lines.append(f"  {_quote(e)};")
    for i, j in cover_edges(lat.n, lat.up):
        lines.append(f"  {_quote(lat.elements[i])} -> {_quote(lat.elements[j])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def space_dot(space: FinSpace, name: str = "space") -> str:
    """Specialization diagram: reduced arcs, plus both arrows inside
    equivalence classes of non-T0 points."""
    up = space.spec_up
    n = space.n
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for p in space.points:
        lines.append(f"  {_quote(p)};")
    for x in range(n):
        for y in bit_indices(up[x]):
            if y == x:
                continue
            if up[y] >> x & 1:  # equivalent points: keep both arrows
                lines.append(f"  {_quote(space.points[x])} -> {_quote(space.points[y])};")
                continue
            between = any(z != x and z != y and up[x] >> z & 1
                          and not up[z] >> x & 1 and up[z] >> y & 1
                          for z in range(n))
            if not between:
                lines.append(f"  {_quote(space.points[x])} -> {_quote(space.points[y])};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def bundle_dot(bundle: QVBundle, name: str = "bundle") -> str:
    """Bipartite kernel diagram: base points on one side, the subspaces
    they hit on the other."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for p in bundle.base.points:
        lines.append(f"  {_quote(p)} [shape=circle];")
    seen = []
    for k in bundle.kappa:
        if k.key not in seen:
            seen.append(k.key)
    for key in seen:
        lines.append(f"  {_quote(key)} [shape=box];")
    for x, k in enumerate(bundle.kappa):
        lines.append(f"  {_quote(bundle.base.points[x])} -> {_quote(k.key)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
