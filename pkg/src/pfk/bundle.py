"""Quotient vector bundles over finite spaces, classified by kernel maps.

A bundle is (base space X, carrier A, kernel map kappa); the total space
is the quotient of A x X identifying (a,x) ~ (b,x) when a-b lies in
kappa(x).  Fibers are represented by canonical coset representatives.
The support / restriction adjunction, the spectral kernel, and the
classification flags (open support, spectral, sober) live here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product

from .bitsets import bit_indices, is_subset, mask_of
from .caps import check_cap, resolve_cap
from .frame import Locale, spectrum_space
from .hyper import spectrum_topology
from .linfq import (FqLinearMap, FqSpace, FqSubspace, QuotientFibers,
                    enumerate_subspaces, full_subspace, identity_linear,
                    quotient_fiber, span, vector_to_str, zero_subspace)
from .order import CheckResult, StructureError
from .space import (CtsMap, FinSpace, check_continuous, check_open_map,
                    open_locale, product_space, quotient_space,
                    separation_report, soberify)


class BundleRejected(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MorphismRejected(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalCheckError(AssertionError):
    """Two routes that must agree disagreed; a bug trap, not an input error."""


@dataclass(frozen=True)
class QVBundle:
    base: FinSpace
    carrier: FqSpace
    kappa: tuple[FqSubspace, ...]

    @cached_property
    def sub_lattice(self):
        return enumerate_subspaces(self.carrier)

    @cached_property
    def kappa_idx(self) -> tuple[int, ...]:
        return tuple(self.sub_lattice.index_of[k.key] for k in self.kappa)

    @cached_property
    def fibers(self) -> tuple[QuotientFibers, ...]:
        return tuple(quotient_fiber(self.carrier, k) for k in self.kappa)

    def q_at(self, a, x: int):
        """The fiber image of carrier vector a over base point x."""
        return self.fibers[x].reduce(a)

    def section(self, a) -> tuple:
        """The global section induced by a: its value over every point."""
        return tuple(self.q_at(a, x) for x in range(self.base.n))

    def nonzero_mask(self, a) -> int:
        return mask_of(x for x in range(self.base.n) if not self.kappa[x].contains(a))

    def open_support(self, a) -> int:
        return self.base.interior(self.nonzero_mask(a))

    def kappa_json(self):
        return {self.base.points[x]: self.kappa[x].to_json() for x in range(self.base.n)}


@lru_cache(maxsize=None)
def _vietoris(carrier: FqSpace):
    return spectrum_topology(carrier, "vietoris")


@lru_cache(maxsize=None)
def _open_support_topology(carrier: FqSpace):
    return spectrum_topology(carrier, "open_support")


@lru_cache(maxsize=None)
def _carrier_base_product(carrier: FqSpace, base: FinSpace) -> FinSpace:
    return product_space(carrier.carrier_topology, base)


def kappa_continuity(base: FinSpace, carrier: FqSpace, kappa: tuple[FqSubspace, ...]):
    """(ok, witness open of the lower Vietoris topology on Sub A)."""
    viet = _vietoris(carrier)
    sl = viet.sub_lattice
    idx = tuple(sl.index_of[k.key] for k in kappa)
    for o in viet.space.opens:
        pre = mask_of(x for x in range(base.n) if o >> idx[x] & 1)
        if not base.is_open(pre):
            return False, o
    return True, None


def kernel_bundle(base: FinSpace, carrier: FqSpace, kappa) -> QVBundle:
    """Validated constructor: kappa must be total and Vietoris continuous."""
    kap = tuple(kappa)
    if len(kap) != base.n:
        raise BundleRejected("kernel map not total on base points")
    for k in kap:
        if k.q != carrier.q or k.ambient_dim != carrier.dim:
            raise BundleRejected(f"kernel value {k.key} not a subspace of the carrier")
    ok, witness = kappa_continuity(base, carrier, kap)
    if not ok:
        viet = _vietoris(carrier)
        raise BundleRejected(
            f"kernel map not continuous; witness Vietoris open {viet.space.names(witness)}",
            witness)
    return QVBundle(base, carrier, kap)


def trivial_bundle(carrier: FqSpace, base: FinSpace) -> QVBundle:
    z = zero_subspace(carrier.q, carrier.dim)
    return kernel_bundle(base, carrier, (z,) * base.n)


def universal_bundle(carrier: FqSpace) -> QVBundle:
    """The bundle over Sub A (lower Vietoris) classified by the identity."""
    viet = _vietoris(carrier)
    return kernel_bundle(viet.space, carrier, viet.sub_lattice.subspaces)


@dataclass(frozen=True)
class TotalSpace:
    product: FinSpace
    space: FinSpace
    q_map: CtsMap
    pi: CtsMap
    points: tuple[tuple[int, tuple], ...]  # (base point index, coset rep)

    @cached_property
    def index(self) -> dict[tuple[int, tuple], int]:
        return {p: i for i, p in enumerate(self.points)}


@lru_cache(maxsize=None)
def total_space(bundle: QVBundle, cap: int | None = None) -> TotalSpace:
    """Materialize E with the true quotient topology; verify q is open and
    the projection is continuous and open, rejecting pathological carriers."""
    base, carrier = bundle.base, bundle.carrier
    prod = _carrier_base_product(carrier, base)
    pts = []
    for x in range(base.n):
        for rep in bundle.fibers[x].reps:
            pts.append((x, rep))
    names = tuple(f"{base.points[x]}|{vector_to_str(r)}" for x, r in pts)
    pos = {p: i for i, p in enumerate(pts)}
    q_table = []
    for a in carrier.vectors:
        for x in range(base.n):
            q_table.append(pos[(x, bundle.q_at(a, x))])
    check_cap("total space topology", 1 << len(pts), cap)
    e_space = quotient_space(prod, names, tuple(q_table), cap)
    q_map = CtsMap(prod, e_space, tuple(q_table))
    ok, w = check_open_map(q_map)
    if not ok:
        raise BundleRejected(
            f"quotient map not open; witness basic open {prod.names(w)} "
            "(carrier-topology pathology)", w)
    pi = CtsMap(e_space, base, tuple(x for x, _ in pts))
    ok, w = check_continuous(pi)
    if not ok:
        raise InternalCheckError(f"projection not continuous at {base.names(w)}")
    ok, w = check_open_map(pi)
    if not ok:
        raise BundleRejected(f"projection not open; witness {e_space.names(w)}", w)
    return TotalSpace(prod, e_space, q_map, pi, tuple(pts))


def zero_section_closed(bundle: QVBundle) -> bool:
    """The zero section is closed in E iff {(a,x) : a not in kappa(x)} is
    open in A x X (its q-preimage), so no total space is needed."""
    prod = _carrier_base_product(bundle.carrier, bundle.base)
    nonzero = 0
    for ai, a in enumerate(bundle.carrier.vectors):
        for x in range(bundle.base.n):
            if not bundle.kappa[x].contains(a):
                nonzero |= 1 << (ai * bundle.base.n + x)
    return prod.is_open(nonzero)


def _spec_monotone(up_src, up_dst, table):
    for i in range(len(table)):
        for j in bit_indices(up_src[i]):
            if not up_dst[table[i]] >> table[j] & 1:
                return False, (i, j)
    return True, None


@dataclass(frozen=True)
class LinearityReport:
    scalar_continuous: dict
    addition_continuous: bool
    addition_witness: object = None

    def to_json(self):
        return {"scalar_continuous": self.scalar_continuous,
                "addition_continuous": self.addition_continuous}


def linearity_report(bundle: QVBundle, ts: TotalSpace | None = None) -> LinearityReport:
    """Continuity of fiberwise scalar action and addition, reported only.

    Addition lives on the fibered product E x_X E; on finite spaces
    continuity is equivalent to specialization monotonicity, which is what
    gets checked (the fibered product carries the product preorder).
    """
    ts = ts or total_space(bundle)
    e = ts.space
    scalar = {}
    for c in range(bundle.carrier.q):
        table = tuple(ts.index[(x, bundle.fibers[x].reduce(tuple(c * v % bundle.carrier.q for v in r)))]
                      for x, r in ts.points)
        ok, _ = check_continuous(CtsMap(e, e, table))
        scalar[str(c)] = ok
    pairs = [(i, j) for i, (x, _) in enumerate(ts.points)
             for j, (y, _) in enumerate(ts.points) if x == y]
    up = []
    for i, j in pairs:
        m = 0
        for k, (i2, j2) in enumerate(pairs):
            if e.spec_up[i] >> i2 & 1 and e.spec_up[j] >> j2 & 1:
                m |= 1 << k
        up.append(m)
    q = bundle.carrier.q
    table = []
    for i, j in pairs:
        x, r1 = ts.points[i]
        _, r2 = ts.points[j]
        s = bundle.fibers[x].reduce(tuple((u + v) % q for u, v in zip(r1, r2)))
        table.append(ts.index[(x, s)])
    ok, w = _spec_monotone(up, e.spec_up, table)
    return LinearityReport(scalar, ok, w)


@dataclass(frozen=True)
class BuildReport:
    bundle: QVBundle
    total: TotalSpace
    checks: tuple[CheckResult, ...]
    linearity: LinearityReport

    @property
    def ok(self):
        return all(c.status == "pass" for c in self.checks)


def build_bundle(base: FinSpace, carrier: FqSpace, kappa, cap: int | None = None) -> BuildReport:
    """Full construction: continuity of kappa, total space, q open,
    projection continuous and open, linearity reported."""
    b = kernel_bundle(base, carrier, kappa)
    ts = total_space(b, cap)
    checks = [
        CheckResult("kernel map Vietoris continuous", "pass"),
        CheckResult("quotient map open", "pass"),
        CheckResult("projection continuous and open", "pass"),
        CheckResult("fiber sizes match q^(dim A - dim kappa)", "pass"
                    if all(len(f.reps) == carrier.q ** (carrier.dim - k.dim)
                           for f, k in zip(b.fibers, b.kappa)) else "fail"),
    ]
    lin = linearity_report(b, ts)
    return BuildReport(b, ts, tuple(checks), lin)


# --- support / restriction adjunction ---------------------------------------


def support_of(bundle: QVBundle, v: FqSubspace) -> int:
    """sigma: union of the open supports of the sections from v."""
    out = 0
    for a in v.members:
        out |= bundle.open_support(a)
    return out


def restriction_to(bundle: QVBundle, u_mask: int):
    """gamma: span of the vectors whose open support lies inside the open.

    Returns (subspace, was_already_subspace); the latter probes whether
    the defining set was a subspace before taking the span.
    """
    vs = [a for a in bundle.carrier.vectors
          if is_subset(bundle.open_support(a), u_mask)]
    sp = span(bundle.carrier.q, bundle.carrier.dim, vs)
    return sp, len(vs) == len(sp.members)


@dataclass(frozen=True)
class SigmaGammaReport:
    adjunction_ok: bool
    witness: object
    gamma_sets_were_subspaces: bool
    sigma_table: dict
    gamma_table: dict


def verify_sigma_gamma(bundle: QVBundle) -> SigmaGammaReport:
    """Exhaustive sigma(V) <= U <=> V <= gamma(U) over Sub A x opens."""
    sl = bundle.sub_lattice
    sigma_tab = {s.key: support_of(bundle, s) for s in sl.subspaces}
    gamma_tab = {}
    all_subspaces = True
    for u in bundle.base.opens:
        g, was = restriction_to(bundle, u)
        gamma_tab[u] = g
        all_subspaces = all_subspaces and was
    witness = None
    for s in sl.subspaces:
        for u in bundle.base.opens:
            lhs = is_subset(sigma_tab[s.key], u)
            rhs = gamma_tab[u].contains_subspace(s)
            if lhs != rhs:
                witness = {"V": s.key, "U": bundle.base.names(u)}
                break
        if witness:
            break
    return SigmaGammaReport(witness is None, witness, all_subspaces,
                            sigma_tab, {bundle.base.open_id(u): g.key
                                        for u, g in gamma_tab.items()})


@dataclass(frozen=True)
class SpectralKernel:
    sigma_space: FinSpace          # the spectrum of the open locale of the base
    prime_opens: tuple[int, ...]   # each prime as an open mask of the base
    table: tuple[int, ...]         # prime -> subspace index
    continuous: bool
    witness: object = None


@lru_cache(maxsize=None)
def spectral_kernel(bundle: QVBundle) -> SpectralKernel:
    """gamma restricted to the prime opens, tested against Vietoris Sub A.

    Also asserts kappa(x) <= kernel(sob x), which holds for every bundle.
    """
    loc = open_locale(bundle.base)
    sig = spectrum_space(loc)
    prime_opens = tuple(bundle.base.opens[p] for p in loc.primes)
    sl = bundle.sub_lattice
    table = tuple(sl.index_of[restriction_to(bundle, p)[0].key] for p in prime_opens)
    viet = _vietoris(bundle.carrier)
    kmap = CtsMap(sig, viet.space, table)
    ok, w = check_continuous(kmap)
    sob, _, _ = soberify(bundle.base)
    for x in range(bundle.base.n):
        if not sl.subspaces[table[sob.table[x]]].contains_subspace(bundle.kappa[x]):
            raise InternalCheckError(
                f"kappa({bundle.base.points[x]}) not contained in kernel(sob x)")
    return SpectralKernel(sig, prime_opens, table, ok,
                          None if ok else viet.space.names(w))


@dataclass(frozen=True)
class BundleClass:
    open_support_property: bool
    kernel_continuous: bool
    spectral: bool
    sober: bool
    osp_witness: object
    checks: tuple[CheckResult, ...]

    def to_json(self):
        d = {"open_support_property": self.open_support_property,
             "kernel_continuous": self.kernel_continuous,
             "spectral": self.spectral, "sober": self.sober}
        if self.osp_witness is not None:
            d["open_support_witness"] = self.osp_witness
        d["criteria"] = [c.to_json() for c in self.checks]
        return d


def classify_bundle(bundle: QVBundle) -> BundleClass:
    """Open support / spectral / sober flags with all coherence criteria.

    The open support property is computed three ways (pointwise openness,
    kappa = kernel o sob, continuity into the open support topology) and
    any disagreement, or any failed cross-implication, is a hard error.
    """
    base = bundle.base
    sl = bundle.sub_lattice

    osp1, osp_witness = True, None
    for a in bundle.carrier.vectors:
        nz = bundle.nonzero_mask(a)
        if not base.is_open(nz):
            osp1, osp_witness = False, {"a": vector_to_str(a), "nonzero": base.names(nz)}
            break

    sk = spectral_kernel(bundle)
    sob, sob_surj, _ = soberify(base)
    osp2 = all(sk.table[sob.table[x]] == bundle.kappa_idx[x] for x in range(base.n))

    ost = _open_support_topology(bundle.carrier)
    osp3, _ = check_continuous(CtsMap(base, ost.space, bundle.kappa_idx))

    if not osp1 == osp2 == osp3:
        raise InternalCheckError(
            f"open support criteria disagree: pointwise={osp1} kernel-route={osp2} "
            f"topology-route={osp3}")

    spectral = osp1 and sk.continuous
    sep = separation_report(base)
    sober = osp1 and sep.sober

    checks = []

    # closure criterion: under the open support property, the kernel is
    # continuous iff comparable primes have topologically equivalent values
    if osp1:
        viet = _vietoris(bundle.carrier)
        cls_eq = True
        prs = sk.prime_opens
        for i, p in enumerate(prs):
            for j, q in enumerate(prs):
                if is_subset(p, q):
                    if viet.space.closure(1 << sk.table[i]) != viet.space.closure(1 << sk.table[j]):
                        cls_eq = False
        if cls_eq != sk.continuous:
            raise InternalCheckError("closure criterion disagrees with kernel continuity")
        checks.append(CheckResult("comparable-primes closure criterion", "pass"))

    # intersection criterion over carrier opens (holds with no hypotheses)
    prime_count = len(sk.prime_opens)
    sig = sk.sigma_space
    inter_ok = True
    for u in bundle.carrier.carrier_topology.opens:
        acc = (1 << prime_count) - 1
        for ai in bit_indices(u):
            a = bundle.carrier.vectors[ai]
            s = support_of(bundle, span(bundle.carrier.q, bundle.carrier.dim, [a]))
            acc &= mask_of(k for k, p in enumerate(sk.prime_opens) if not is_subset(s, p))
        if not sig.is_open(((1 << prime_count) - 1) ^ acc):
            inter_ok = False
            break
    if inter_ok != sk.continuous:
        raise InternalCheckError("intersection criterion disagrees with kernel continuity")
    checks.append(CheckResult("closed-intersection criterion", "pass"))

    # preimage identity, when open support + continuity hold
    if osp1 and sk.continuous:
        viet = _vietoris(bundle.carrier)
        for w in viet.space.opens:
            lhs = mask_of(k for k in range(prime_count) if w >> sk.table[k] & 1)
            kpre = mask_of(x for x in range(base.n) if w >> bundle.kappa_idx[x] & 1)
            rhs = mask_of(k for k, p in enumerate(sk.prime_opens) if not is_subset(kpre, p))
            if lhs != rhs:
                raise InternalCheckError("kernel preimage identity failed")
        checks.append(CheckResult("kernel preimage identity", "pass"))

    if zero_section_closed(bundle) and not osp1:
        raise InternalCheckError("closed zero section without open support property")
    checks.append(CheckResult("closed zero section implies open support", "pass"))

    if osp1 and sob_surj and not spectral:
        raise InternalCheckError("open support with surjective sob must be spectral")
    if sep.sober and osp1 and not spectral:
        raise InternalCheckError("sober bundle must be spectral")

    # Hausdorff-fiber analog: kappa valued in closed subspaces forces the
    # kernel to be constant along specialization
    carrier_top = bundle.carrier.carrier_topology
    max_valued = all(carrier_top.closure(sl.member_masks[i]) == sl.member_masks[i]
                     for i in bundle.kappa_idx)
    if spectral and max_valued:
        for x in range(base.n):
            for y in bit_indices(base.spec_up[x]):
                if bundle.kappa_idx[x] != bundle.kappa_idx[y]:
                    raise InternalCheckError(
                        "spectral bundle with closed kernels varies along specialization")
        checks.append(CheckResult("specialization-constant kernel", "pass"))

    return BundleClass(osp1, sk.continuous, spectral, sober, osp_witness, tuple(checks))


# --- radical and global sections ---------------------------------------------


@dataclass(frozen=True)
class RadicalReport:
    radical: FqSubspace
    quotient: QuotientFibers  # the realized section space as A / radical
    hat: dict

    @property
    def section_space_dim(self) -> int:
        return self.quotient.space.dim - self.quotient.subspace.dim


def radical_and_sections(bundle: QVBundle) -> RadicalReport:
    from .linfq import subspace_intersect

    rad = full_subspace(bundle.carrier.q, bundle.carrier.dim)
    for k in bundle.kappa:
        rad = subspace_intersect(rad, k)
    quot = quotient_fiber(bundle.carrier, rad)
    hat = {vector_to_str(a): bundle.section(a) for a in bundle.carrier.vectors}
    # hat is injective on A / radical
    for a in bundle.carrier.vectors:
        for b in bundle.carrier.vectors:
            same = hat[vector_to_str(a)] == hat[vector_to_str(b)]
            diff = tuple((x - y) % bundle.carrier.q for x, y in zip(a, b))
            if same != rad.contains(diff):
                raise InternalCheckError("sections identified exactly modulo the radical")
    return RadicalReport(rad, quot, hat)


def pullback(f: CtsMap, bundle: QVBundle):
    """Pullback along a continuous map into the base; returns the bundle
    over the source plus the canonical strict morphism into the original."""
    if f.target != bundle.base:
        raise StructureError("pullback map must land in the bundle's base")
    ok, w = check_continuous(f)
    if not ok:
        raise StructureError(f"pullback map not continuous at {f.target.names(w)}")
    kap = tuple(bundle.kappa[f.table[y]] for y in range(f.source.n))
    pulled = kernel_bundle(f.source, bundle.carrier, kap)
    canonical = check_morphism(pulled, bundle, f,
                               identity_linear(bundle.carrier.q, bundle.carrier.dim))
    if not canonical.strict:
        raise InternalCheckError("canonical pullback morphism must be strict")
    return pulled, canonical


# --- morphisms ----------------------------------------------------------------


@dataclass(frozen=True)
class BundleMorphism:
    """A morphism src -> dst: base map src.base -> dst.base together with a
    linear map dst.carrier -> src.carrier, lax-compatible with the kernels."""

    src: QVBundle
    dst: QVBundle
    f_flat: CtsMap
    f_star: FqLinearMap
    strict: bool
    strict_witness: object = field(default=None, compare=False)

    def sharp(self, e_rep, y: int):
        """The derived fiber map over y, on coset representatives."""
        return self.src.fibers[y].reduce(self.f_star(e_rep))

    def is_identity_shape(self) -> bool:
        return (self.f_flat.table == tuple(range(self.src.base.n))
                and self.f_star.is_identity())

    def key(self):
        return (self.f_flat.table, self.f_star.matrix)

    def to_json(self):
        return {"f_flat": self.f_flat.to_json(), "f_star": self.f_star.to_json(),
                "strict": self.strict}


def lax_law_holds(src: QVBundle, dst: QVBundle, flat_table, f_star: FqLinearMap):
    """(lax ok, strict ok, lax witness, strict witness)."""
    lax_w = strict_w = None
    for a in dst.carrier.vectors:
        fa = f_star(a)
        for y in range(src.base.n):
            dst_zero = dst.kappa[flat_table[y]].contains(a)
            src_zero = src.kappa[y].contains(fa)
            if dst_zero and not src_zero and lax_w is None:
                lax_w = {"a": vector_to_str(a), "y": src.base.points[y]}
            if src_zero and not dst_zero and strict_w is None:
                strict_w = {"a": vector_to_str(a), "y": src.base.points[y]}
    return lax_w is None, lax_w is None and strict_w is None, lax_w, strict_w


def check_morphism(src: QVBundle, dst: QVBundle, f_flat: CtsMap,
                   f_star: FqLinearMap) -> BundleMorphism:
    """Verify the vanishing implication, synthesize the fiber map, and check
    it well-defined, continuous, and fiberwise linear."""
    if f_flat.source != src.base or f_flat.target != dst.base:
        raise StructureError("f_flat endpoints do not match the bundles")
    ok, w = check_continuous(f_flat)
    if not ok:
        raise MorphismRejected(f"f_flat not continuous at {dst.base.names(w)}", w)
    if (f_star.q != src.carrier.q or f_star.source_dim != dst.carrier.dim
            or f_star.target_dim != src.carrier.dim):
        raise StructureError("f_star shape does not match the carriers")
    lax, strict, lax_w, strict_w = lax_law_holds(src, dst, f_flat.table, f_star)
    if not lax:
        raise MorphismRejected(f"vanishing implication fails at {lax_w}", lax_w)
    mor = BundleMorphism(src, dst, f_flat, f_star, strict, strict_w)
    _verify_sharp(mor)
    _verify_radical_condition(mor)
    return mor


def _verify_sharp(mor: BundleMorphism):
    src, dst = mor.src, mor.dst
    # well-defined: every member of a coset gives the same value
    for y in range(src.base.n):
        x = mor.f_flat.table[y]
        for a in dst.carrier.vectors:
            rep = dst.q_at(a, x)
            if mor.sharp(rep, y) != src.fibers[y].reduce(mor.f_star(a)):
                raise InternalCheckError("derived fiber map not well defined")
    # fiberwise linear
    q = src.carrier.q
    for y in range(src.base.n):
        x = mor.f_flat.table[y]
        reps = dst.fibers[x].reps
        for r1 in reps:
            for r2 in reps:
                s = dst.fibers[x].reduce(tuple((u + v) % q for u, v in zip(r1, r2)))
                lhs = mor.sharp(s, y)
                rhs = src.fibers[y].reduce(
                    tuple((u + v) % q for u, v in zip(mor.sharp(r1, y), mor.sharp(r2, y))))
                if lhs != rhs:
                    raise InternalCheckError("derived fiber map not additive")
            for c in range(q):
                s = dst.fibers[x].reduce(tuple(c * u % q for u in r1))
                if mor.sharp(s, y) != src.fibers[y].reduce(
                        tuple(c * u % q for u in mor.sharp(r1, y))):
                    raise InternalCheckError("derived fiber map not homogeneous")
    # continuity on the fibered product, as specialization monotonicity
    ts_src = total_space(src)
    ts_dst = total_space(dst)
    pairs = [(e, y) for y in range(src.base.n)
             for e, (x, _) in enumerate(ts_dst.points) if x == mor.f_flat.table[y]]
    up = []
    for e, y in pairs:
        m = 0
        for k, (e2, y2) in enumerate(pairs):
            if ts_dst.space.spec_up[e] >> e2 & 1 and src.base.spec_up[y] >> y2 & 1:
                m |= 1 << k
        up.append(m)
    table = []
    for e, y in pairs:
        _, rep = ts_dst.points[e]
        table.append(ts_src.index[(y, mor.sharp(rep, y))])
    ok, w = _spec_monotone(up, ts_src.space.spec_up, table)
    if not ok:
        raise InternalCheckError(f"derived fiber map not continuous at pair {w}")


def _verify_radical_condition(mor: BundleMorphism):
    rad_dst = radical_and_sections(mor.dst).radical
    rad_src = radical_and_sections(mor.src).radical
    for r in rad_dst.rows:
        if not rad_src.contains(mor.f_star(r)):
            raise InternalCheckError("radical condition f*(rad dst) <= rad src failed")


def identity_morphism(bundle: QVBundle) -> BundleMorphism:
    from .space import identity_cts

    return check_morphism(bundle, bundle, identity_cts(bundle.base),
                          identity_linear(bundle.carrier.q, bundle.carrier.dim))


def compose_morphisms(f: BundleMorphism, g: BundleMorphism) -> BundleMorphism:
    """f o g for g: C -> B and f: B -> A; re-checked from scratch, and the
    derived fiber map is compared against the span-composition formula."""
    if g.dst != f.src:
        raise StructureError("morphisms not composable")
    flat = f.f_flat.compose(g.f_flat)
    star = g.f_star.compose(f.f_star)
    out = check_morphism(g.src, f.dst, flat, star)
    for z in range(g.src.base.n):
        x = flat.table[z]
        for rep in f.dst.fibers[x].reps:
            via_formula = g.sharp(f.sharp(rep, g.f_flat.table[z]), z)
            if out.sharp(rep, z) != via_formula:
                raise InternalCheckError("composite fiber map disagrees with span formula")
    return out


def section_map(mor: BundleMorphism, section: tuple) -> tuple:
    """The induced map on global sections: pull back along the base map,
    then apply the fiber maps."""
    return tuple(mor.sharp(section[mor.f_flat.table[y]], y)
                 for y in range(mor.src.base.n))


def verify_section_functor(mor: BundleMorphism):
    """hat(a) must be sent to hat(f_star(a)); returns the induced table on
    hat sections of the destination."""
    out = {}
    for a in mor.dst.carrier.vectors:
        img = section_map(mor, mor.dst.section(a))
        if img != mor.src.section(mor.f_star(a)):
            raise InternalCheckError("section functor disagrees on hat sections")
        out[vector_to_str(a)] = img
    return out


def all_sections(bundle: QVBundle) -> list[tuple]:
    """All continuous global sections, as tuples of fiber representatives."""
    ts = total_space(bundle)
    fibs = [bundle.fibers[x].reps for x in range(bundle.base.n)]
    out = []
    for choice in product(*fibs):
        table = tuple(ts.index[(x, r)] for x, r in enumerate(choice))
        ok, _ = check_continuous(CtsMap(bundle.base, ts.space, table))
        if ok:
            out.append(choice)
    return out


def enumerate_kernel_maps(base: FinSpace, carrier: FqSpace, filt: str = "continuous",
                          cap: int | None = None):
    """All kernel maps passing the filter, in lexicographic order.

    Filters: continuous | open_support | spectral | sober.
    """
    if filt not in ("continuous", "open_support", "spectral", "sober"):
        raise ValueError(f"unknown filter {filt!r}")
    sl = enumerate_subspaces(carrier)
    total = sl.n ** base.n
    check_cap("kernel map enumeration", total, cap)
    out = []
    for combo in product(range(sl.n), repeat=base.n):
        kap = tuple(sl.subspaces[i] for i in combo)
        ok, _ = kappa_continuity(base, carrier, kap)
        if not ok:
            continue
        if filt != "continuous":
            b = QVBundle(base, carrier, kap)
            cls = classify_bundle(b)
            if filt == "open_support" and not cls.open_support_property:
                continue
            if filt == "spectral" and not cls.spectral:
                continue
            if filt == "sober" and not cls.sober:
                continue
        out.append(kap)
    return out


def enumerate_bundle_morphisms(src: QVBundle, dst: QVBundle,
                               cap: int | None = None) -> list[BundleMorphism]:
    """The full hom-set, by scanning continuous base maps against all
    linear maps of carriers and keeping the lax-compatible pairs."""
    from .linfq import enumerate_linear_maps

    flats = []
    total = dst.base.n ** src.base.n
    check_cap("bundle hom enumeration", total, cap)
    for table in product(range(dst.base.n), repeat=src.base.n):
        f = CtsMap(src.base, dst.base, table)
        ok, _ = check_continuous(f)
        if ok:
            flats.append(f)
    stars = enumerate_linear_maps(dst.carrier.q, dst.carrier.dim, src.carrier.dim, cap)
    out = []
    for f in flats:
        for s in stars:
            lax, _, _, _ = lax_law_holds(src, dst, f.table, s)
            if lax:
                out.append(check_morphism(src, dst, f, s))
    return out
