"""Linear algebra over a prime field: canonical subspaces and Sub A.

Vectors are coordinate tuples mod q, serialized as digit strings
("01" = (0,1)).  A subspace is its reduced row-echelon basis, so equal
subspaces are equal values and the canonical key "dim:rref-row-concat"
is stable across modules and JSON.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

from .bitsets import bit_indices, mask_of
from .caps import check_cap
from .order import FinLattice, LatticeMap, StructureError, verify_adjunction
from .space import FinSpace, discrete_space

Vector = tuple[int, ...]


def _check_prime(q: int):
    if q < 2 or any(q % d == 0 for d in range(2, int(q**0.5) + 1)):
        raise StructureError(f"q must be a prime, got {q}")


def vector_to_str(v: Vector) -> str:
    return "".join(str(c) for c in v)


def vector_from_str(s: str, q: int, dim: int) -> Vector:
    if len(s) != dim:
        raise StructureError(f"vector string {s!r} has wrong length (expected {dim})")
    v = tuple(int(c) for c in s)
    if any(not 0 <= c < q for c in v):
        raise StructureError(f"vector string {s!r} has digits outside F_{q}")
    return v


def rref(rows: list[list[int]], q: int) -> list[tuple[int, ...]]:
    """Reduced row echelon form over Z/q, nonzero rows only."""
    mat = [list(r) for r in rows]
    if not mat:
        return []
    ncols = len(mat[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] % q), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], q - 2, q)
        mat[r] = [x * inv % q for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % q:
                f = mat[i][c]
                mat[i] = [(x - f * y) % q for x, y in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat[:r] if any(row)]


@dataclass(frozen=True)
class FqSubspace:
    q: int
    ambient_dim: int
    rows: tuple[Vector, ...]  # RREF basis, pivots strictly increasing

    @property
    def dim(self) -> int:
        return len(self.rows)

    @cached_property
    def key(self) -> str:
        return f"{self.dim}:" + "".join(vector_to_str(r) for r in self.rows)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, c in enumerate(row) if c) for row in self.rows)

    def reduce(self, v: Vector) -> Vector:
        """Canonical coset representative of v modulo this subspace."""
        out = list(v)
        for row, p in zip(self.rows, self.pivots):
            f = out[p]
            if f:
                out = [(x - f * y) % self.q for x, y in zip(out, row)]
        return tuple(out)

    def contains(self, v: Vector) -> bool:
        return not any(self.reduce(v))

    def contains_subspace(self, other: "FqSubspace") -> bool:
        return all(self.contains(r) for r in other.rows)

    @cached_property
    def members(self) -> tuple[Vector, ...]:
        out = []
        for coeffs in product(range(self.q), repeat=self.dim):
            v = [0] * self.ambient_dim
            for c, row in zip(coeffs, self.rows):
                for i, x in enumerate(row):
                    v[i] = (v[i] + c * x) % self.q
            out.append(tuple(v))
        return tuple(sorted(out))

    def to_json(self):
        return {"basis": [vector_to_str(r) for r in self.rows]}


def span(q: int, dim: int, vectors) -> FqSubspace:
    rows = rref([list(v) for v in vectors], q)
    return FqSubspace(q, dim, tuple(rows))


def zero_subspace(q: int, dim: int) -> FqSubspace:
    return FqSubspace(q, dim, ())


def full_subspace(q: int, dim: int) -> FqSubspace:
    eye = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    return FqSubspace(q, dim, tuple(eye))


def subspace_sum(v: FqSubspace, w: FqSubspace) -> FqSubspace:
    _check_compatible(v, w)
    return span(v.q, v.ambient_dim, v.rows + w.rows)


def nullspace(rows: tuple[Vector, ...], q: int, dim: int) -> FqSubspace:
    """Kernel of the matrix whose rows are given (solutions of R x = 0)."""
    mat = rref([list(r) for r in rows], q)
    pivots = [next(i for i, c in enumerate(row) if c) for row in mat]
    free = [i for i in range(dim) if i not in pivots]
    basis = []
    for f in free:
        v = [0] * dim
        v[f] = 1
        for row, p in zip(mat, pivots):
            v[p] = (-row[f]) % q
        basis.append(tuple(v))
    return span(q, dim, basis)


def annihilator(v: FqSubspace) -> FqSubspace:
    """Row space of constraints cutting out v: {u : u . x = 0 for x in v}."""
    return nullspace(v.rows, v.q, v.ambient_dim)


def subspace_intersect(v: FqSubspace, w: FqSubspace) -> FqSubspace:
    # solve the stacked constraints of both subspaces
    _check_compatible(v, w)
    stacked = annihilator(v).rows + annihilator(w).rows
    return nullspace(stacked, v.q, v.ambient_dim)


def _check_compatible(v: FqSubspace, w: FqSubspace):
    if v.q != w.q or v.ambient_dim != w.ambient_dim:
        raise StructureError("subspaces live in different spaces")


def subspace_ops(op: str, *args):
    """Dispatch used by the CLI: span | sum | intersect | member."""
    if op == "span":
        return span(*args)
    if op == "sum":
        return subspace_sum(*args)
    if op == "intersect":
        return subspace_intersect(*args)
    if op == "member":
        v, sub = args
        return sub.contains(v)
    raise ValueError(f"unknown subspace op {op!r}")


@dataclass(frozen=True)
class FqSpace:
    """F_q^dim together with a finite carrier topology on its vectors.

    The default carrier is discrete (the only Hausdorff-like choice at
    finite scale); non-discrete carriers are accepted as explicit inputs
    with no vector-topology axioms enforced.
    """

    q: int
    dim: int
    carrier: FinSpace | None = None

    def __post_init__(self):
        _check_prime(self.q)
        if self.dim < 0:
            raise StructureError("dim must be nonnegative")
        if self.carrier is not None:
            expected = tuple(vector_to_str(v) for v in _all_vectors(self.q, self.dim))
            if self.carrier.points != expected:
                raise StructureError("carrier topology points must be the vectors in lex order")

    @property
    def size(self) -> int:
        return self.q**self.dim

    @cached_property
    def vectors(self) -> tuple[Vector, ...]:
        return _all_vectors(self.q, self.dim)

    @cached_property
    def vector_index(self) -> dict[Vector, int]:
        return {v: i for i, v in enumerate(self.vectors)}

    @cached_property
    def carrier_topology(self) -> FinSpace:
        if self.carrier is not None:
            return self.carrier
        check_cap("discrete carrier topology", 1 << self.size)
        return discrete_space(tuple(vector_to_str(v) for v in self.vectors))

    @property
    def carrier_is_discrete(self) -> bool:
        return len(self.carrier_topology.opens) == 1 << self.size

    def to_json(self):
        d = {"q": self.q, "dim": self.dim}
        d["carrier"] = "discrete" if self.carrier is None else self.carrier.to_json()
        return d


def _all_vectors(q: int, dim: int) -> tuple[Vector, ...]:
    return tuple(product(range(q), repeat=dim))


@dataclass(frozen=True)
class FqLinearMap:
    """target_dim x source_dim matrix over F_q."""

    q: int
    source_dim: int
    target_dim: int
    matrix: tuple[Vector, ...]

    def __post_init__(self):
        if len(self.matrix) != self.target_dim or any(len(r) != self.source_dim for r in self.matrix):
            raise StructureError("matrix shape mismatch")

    def __call__(self, v: Vector) -> Vector:
        return tuple(sum(c * x for c, x in zip(row, v)) % self.q for row in self.matrix)

    def compose(self, other: "FqLinearMap") -> "FqLinearMap":
        """self o other (apply other first)."""
        if other.target_dim != self.source_dim or other.q != self.q:
            raise StructureError("linear map composition mismatch")
        rows = []
        for i in range(self.target_dim):
            rows.append(tuple(sum(self.matrix[i][k] * other.matrix[k][j]
                                  for k in range(self.source_dim)) % self.q
                              for j in range(other.source_dim)))
        return FqLinearMap(self.q, other.source_dim, self.target_dim, tuple(rows))

    def is_identity(self) -> bool:
        return self.source_dim == self.target_dim and all(
            self.matrix[i][j] == int(i == j)
            for i in range(self.target_dim) for j in range(self.source_dim))

    def to_json(self):
        return [list(r) for r in self.matrix]


def identity_linear(q: int, dim: int) -> FqLinearMap:
    return FqLinearMap(q, dim, dim, tuple(tuple(int(i == j) for j in range(dim))
                                          for i in range(dim)))


def linear_map(q: int, source_dim: int, target_dim: int, rows) -> FqLinearMap:
    return FqLinearMap(q, source_dim, target_dim, tuple(tuple(c % q for c in r) for r in rows))


def enumerate_linear_maps(q: int, source_dim: int, target_dim: int,
                          cap: int | None = None) -> list[FqLinearMap]:
    total = q ** (source_dim * target_dim)
    check_cap("linear map enumeration", total, cap)
    out = []
    for entries in product(range(q), repeat=source_dim * target_dim):
        rows = tuple(tuple(entries[i * source_dim:(i + 1) * source_dim])
                     for i in range(target_dim))
        out.append(FqLinearMap(q, source_dim, target_dim, rows))
    return out


def map_subspace(f: FqLinearMap, v: FqSubspace, direction: str) -> FqSubspace:
    if v.q != f.q:
        raise StructureError("field mismatch")
    if direction == "image":
        if v.ambient_dim != f.source_dim:
            raise StructureError("dimension mismatch for image")
        return span(f.q, f.target_dim, [f(r) for r in v.rows])
    if direction == "preimage":
        if v.ambient_dim != f.target_dim:
            raise StructureError("dimension mismatch for preimage")
        # f^{-1}(v) = kernel of (annihilator of v) composed with f
        constraints = []
        for u in annihilator(v).rows:
            constraints.append(tuple(sum(u[i] * f.matrix[i][j] for i in range(f.target_dim)) % f.q
                                     for j in range(f.source_dim)))
        return nullspace(tuple(constraints), f.q, f.source_dim)
    raise ValueError(f"direction must be image or preimage, not {direction!r}")


@dataclass(frozen=True)
class SubLattice:
    """The lattice of all subspaces of an FqSpace, ordered by inclusion."""

    space: FqSpace
    subspaces: tuple[FqSubspace, ...]
    lattice: FinLattice

    @cached_property
    def index_of(self) -> dict[str, int]:
        return {s.key: i for i, s in enumerate(self.subspaces)}

    @cached_property
    def member_masks(self) -> tuple[int, ...]:
        """Per subspace, the bitmask of its vectors (carrier point indices)."""
        vi = self.space.vector_index
        return tuple(mask_of(vi[m] for m in s.members) for s in self.subspaces)

    def containing(self, v: Vector) -> int:
        """Bitmask of subspaces containing the vector."""
        vi = self.space.vector_index[v]
        return mask_of(i for i, m in enumerate(self.member_masks) if m >> vi & 1)

    @property
    def n(self) -> int:
        return len(self.subspaces)


@lru_cache(maxsize=None)
def enumerate_subspaces(space: FqSpace, cap: int | None = None) -> SubLattice:
    """All subspaces in canonical (dimension, RREF-key) order, as a lattice."""
    q, dim = space.q, space.dim
    check_cap("subspace enumeration", q ** (dim * dim) if dim else 1, cap)
    subs = _all_subspaces(q, dim)
    subs.sort(key=lambda s: (s.dim, s.key))
    up = []
    for s in subs:
        up.append(mask_of(j for j, t in enumerate(subs) if t.contains_subspace(s)))
    lat = FinLattice(tuple(s.key for s in subs), tuple(up))
    return SubLattice(space, tuple(subs), lat)


def _all_subspaces(q: int, dim: int) -> list[FqSubspace]:
    """Enumerate RREF matrices directly: pick pivot columns, fill free entries."""
    from itertools import combinations

    out = [zero_subspace(q, dim)]
    for r in range(1, dim + 1):
        for pivots in combinations(range(dim), r):
            free_cells = []
            for i, p in enumerate(pivots):
                nxt = pivots[i + 1] if i + 1 < r else dim
                for c in range(p + 1, dim):
                    if c >= nxt and c in pivots:
                        continue
                    if c > p and c not in pivots:
                        free_cells.append((i, c))
            for fill in product(range(q), repeat=len(free_cells)):
                rows = [[0] * dim for _ in range(r)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, c), val in zip(free_cells, fill):
                    rows[i][c] = val
                out.append(FqSubspace(q, dim, tuple(tuple(x) for x in rows)))
    return out


def brute_force_subspace_count(q: int, dim: int, cap: int | None = None) -> int:
    """Oracle: subsets of F_q^dim closed under addition and scalars."""
    vectors = _all_vectors(q, dim)
    n = len(vectors)
    check_cap("brute force subspace scan", 1 << (n - 1) if n else 1, cap)
    idx = {v: i for i, v in enumerate(vectors)}
    zero_bit = 1 << idx[tuple([0] * dim)]
    count = 0
    for m in range(1 << n):
        if not m & zero_bit:
            continue
        vs = [vectors[i] for i in bit_indices(m)]
        closed = True
        for a in vs:
            for b in vs:
                s = tuple((x + y) % q for x, y in zip(a, b))
                if not m >> idx[s] & 1:
                    closed = False
                    break
            if closed:
                for c in range(q):
                    sc = tuple(c * x % q for x in a)
                    if not m >> idx[sc] & 1:
                        closed = False
                        break
            if not closed:
                break
        if closed:
            count += 1
    return count


def sub_map(f: FqLinearMap, source: SubLattice, target: SubLattice) -> LatticeMap:
    """The direct image map Sub f on subspace lattices."""
    table = tuple(target.index_of[map_subspace(f, s, "image").key]
                  for s in source.subspaces)
    return LatticeMap(source.lattice, target.lattice, table)


def preimage_map(f: FqLinearMap, source: SubLattice, target: SubLattice) -> LatticeMap:
    table = tuple(source.index_of[map_subspace(f, s, "preimage").key]
                  for s in target.subspaces)
    return LatticeMap(target.lattice, source.lattice, table)


@dataclass(frozen=True)
class QuotientFibers:
    space: FqSpace
    subspace: FqSubspace
    reps: tuple[Vector, ...]

    def reduce(self, v: Vector) -> Vector:
        return self.subspace.reduce(v)


def quotient_fiber(space: FqSpace, v: FqSubspace) -> QuotientFibers:
    """Canonical coset representatives of A / v (zero in pivot coordinates)."""
    if v.q != space.q or v.ambient_dim != space.dim:
        raise StructureError("subspace does not live in the given space")
    reps = sorted({v.reduce(a) for a in space.vectors})
    assert len(reps) == space.q ** (space.dim - v.dim)
    return QuotientFibers(space, v, tuple(reps))


def verify_sub_preimage_adjunction(f: FqLinearMap, source: SubLattice, target: SubLattice):
    fwd = sub_map(f, source, target)
    back = preimage_map(f, source, target)
    return verify_adjunction(fwd, back)
