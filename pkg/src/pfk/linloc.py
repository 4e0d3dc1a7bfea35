"""Linearized locales and the adjunction with spectral bundles.

A linearized locale is a frame together with a carrier space and a
join-preserving support map from the subspace lattice into the frame,
whose right adjoint restricts to a continuous kernel on primes.  The
spectrum construction turns one into a bundle over the frame's spectrum;
the converse packages a spectral bundle's support/restriction pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

from .bitsets import bit_indices, is_subset, mask_of
from .caps import check_cap, resolve_cap
from .frame import (Locale, LocaleMap, enumerate_frame_homs, make_locale_map,
                    spectrum_map, spectrum_space)
from .bundle import (BundleMorphism, InternalCheckError, QVBundle, check_morphism,
                     classify_bundle, kernel_bundle, restriction_to,
                     spectral_kernel, support_of)
from .hyper import MaxReport, max_subspaces, spectrum_topology
from .linfq import (FqLinearMap, FqSpace, FqSubspace, enumerate_linear_maps,
                    enumerate_subspaces, map_subspace, span)
from .order import (LatticeMap, PreservationError, StructureError, adjoint,
                    preserves_all_joins)
from .space import CtsMap, FinSpace, check_continuous, open_locale, soberify


class LinLocaleRejected(ValueError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class LinLocale:
    frame: Locale
    carrier: FqSpace
    support_table: tuple[int, ...]  # subspace index -> frame element

    @cached_property
    def sub_lattice(self):
        return enumerate_subspaces(self.carrier)

    @cached_property
    def support_map(self) -> LatticeMap:
        return LatticeMap(self.sub_lattice.lattice, self.frame.lattice, self.support_table)

    @cached_property
    def restriction_map(self) -> LatticeMap:
        return adjoint(self.support_map, "right_of_join_preserving")

    @cached_property
    def kernel_table(self) -> tuple[int, ...]:
        """Restriction of the right adjoint to the primes, in prime order."""
        return tuple(self.restriction_map.table[p] for p in self.frame.primes)

    def support_json(self):
        lat = self.frame.lattice
        return {s.key: lat.elements[self.support_table[i]]
                for i, s in enumerate(self.sub_lattice.subspaces)}


def build_linloc(frame: Locale, carrier: FqSpace, support_table,
                 cap: int | None = None) -> LinLocale:
    """Validated constructor.

    Verifies that the support map preserves all joins of Sub A, computes
    the right adjoint, checks the kernel continuous into Vietoris Sub A,
    and asserts the comparable-primes consequence.
    """
    ll = LinLocale(frame, carrier, tuple(support_table))
    ok, w = preserves_all_joins(ll.support_map, cap)
    if ok is None:
        raise PreservationError("join preservation scan exceeded the cap")
    if not ok:
        raise LinLocaleRejected(f"support map does not preserve joins: {w}", w)
    viet = spectrum_topology(carrier, "vietoris")
    sigma = spectrum_space(frame)
    kmap = CtsMap(sigma, viet.space, ll.kernel_table)
    ok, w = check_continuous(kmap)
    if not ok:
        raise LinLocaleRejected(
            f"kernel not continuous; witness Vietoris open {viet.space.names(w)}", w)
    lat = frame.lattice
    for i, p in enumerate(frame.primes):
        for j, q in enumerate(frame.primes):
            if lat.leq(p, q):
                ci = viet.space.closure(1 << ll.kernel_table[i])
                cj = viet.space.closure(1 << ll.kernel_table[j])
                if ci != cj:
                    raise InternalCheckError(
                        "comparable primes with inequivalent restriction values")
    return ll


def linloc_from_line_values(frame: Locale, carrier: FqSpace,
                            line_values: dict[str, str], cap: int | None = None) -> LinLocale:
    """Extend a support table given only on the lines (join-irreducibles)
    by joins, then re-verify the whole table."""
    sl = enumerate_subspaces(carrier)
    lat = frame.lattice
    table = []
    for s in sl.subspaces:
        if s.dim == 0:
            table.append(lat.bottom)
            continue
        mask = 0
        for i, t in enumerate(sl.subspaces):
            if t.dim == 1 and s.contains_subspace(t):
                key = t.key
                if key not in line_values:
                    raise StructureError(f"missing support value for line {key}")
                mask |= 1 << lat.index[line_values[key]]
        table.append(lat.join_mask(mask))
    return build_linloc(frame, carrier, table, cap)


# --- the two functors ---------------------------------------------------------


def spec_bundle(ll: LinLocale) -> QVBundle:
    """The spectrum bundle: base is the frame's spectrum, kernel is the
    restriction of the right adjoint to primes.  Classified spectral and
    sober, and the identity {p : a not in gamma(p)} = U_{sigma<a>} checked."""
    sigma = spectrum_space(ll.frame)
    sl = ll.sub_lattice
    kappa = tuple(sl.subspaces[i] for i in ll.kernel_table)
    b = kernel_bundle(sigma, ll.carrier, kappa)
    cls = classify_bundle(b)
    if not (cls.spectral and cls.sober):
        raise InternalCheckError("spectrum bundle must classify spectral and sober")
    lat = ll.frame.lattice
    prime_pos = {p: k for k, p in enumerate(ll.frame.primes)}
    for a in ll.carrier.vectors:
        line = span(ll.carrier.q, ll.carrier.dim, [a])
        s = ll.support_table[sl.index_of[line.key]]
        u_s = mask_of(k for p, k in prime_pos.items() if not lat.leq(s, p))
        not_in_gamma = mask_of(k for k, i in enumerate(ll.kernel_table)
                               if not sl.subspaces[i].contains(a))
        if u_s != not_in_gamma:
            raise InternalCheckError("support line opens disagree with kernel membership")
    return b


def omega_linloc(bundle: QVBundle) -> LinLocale:
    """Package a spectral bundle's support/restriction pair over its open
    locale; validation re-runs in the constructor."""
    cls = classify_bundle(bundle)
    if not cls.spectral:
        raise LinLocaleRejected("bundle is not spectral", cls.to_json())
    loc = open_locale(bundle.base)
    sl = enumerate_subspaces(bundle.carrier)
    open_index = {o: i for i, o in enumerate(bundle.base.opens)}
    table = tuple(open_index[support_of(bundle, s)] for s in sl.subspaces)
    return build_linloc(loc, bundle.carrier, table)


# --- morphisms of linearized locales ------------------------------------------


@dataclass(frozen=True)
class LLMorphism:
    """src -> dst, carried by the inverse image dst.frame -> src.frame and a
    linear map dst.carrier -> src.carrier, laxly compatible with supports."""

    src: LinLocale
    dst: LinLocale
    underline: LocaleMap     # locale map src.frame -> dst.frame
    overline: FqLinearMap    # dst.carrier -> src.carrier
    strict: bool
    strict_witness: object = field(default=None, compare=False)

    def key(self):
        return (self.underline.inverse_image.table, self.overline.matrix)

    def to_json(self):
        return {"inverse_image": self.underline.inverse_image.to_json(),
                "overline": self.overline.to_json(), "strict": self.strict}


def ll_lax_law(src: LinLocale, dst: LinLocale, inverse_table, overline: FqLinearMap):
    """support_src(span overline(V)) <= inverse(support_dst(V)) for all V."""
    src_lat = src.frame.lattice
    src_sl, dst_sl = src.sub_lattice, dst.sub_lattice
    lax_w = strict_w = None
    for i, v in enumerate(dst_sl.subspaces):
        img = map_subspace(overline, v, "image")
        lhs = src.support_table[src_sl.index_of[img.key]]
        rhs = inverse_table[dst.support_table[i]]
        if not src_lat.leq(lhs, rhs) and lax_w is None:
            lax_w = {"V": v.key}
        if src_lat.leq(lhs, rhs) and lhs != rhs and strict_w is None:
            strict_w = {"V": v.key}
    return lax_w is None, lax_w is None and strict_w is None, lax_w, strict_w


def check_ll_morphism(src: LinLocale, dst: LinLocale, inverse_table,
                      overline: FqLinearMap, cap: int | None = None) -> LLMorphism:
    underline = make_locale_map(src.frame, dst.frame, tuple(inverse_table), cap)
    if (overline.q != src.carrier.q or overline.source_dim != dst.carrier.dim
            or overline.target_dim != src.carrier.dim):
        raise StructureError("overline shape does not match the carriers")
    lax, strict, lax_w, strict_w = ll_lax_law(src, dst, tuple(inverse_table), overline)
    if not lax:
        raise LinLocaleRejected(f"lax support law fails at {lax_w}", lax_w)
    return LLMorphism(src, dst, underline, overline, strict, strict_w)


def identity_ll_morphism(ll: LinLocale) -> LLMorphism:
    return check_ll_morphism(ll, ll, tuple(range(ll.frame.lattice.n)),
                             _identity_linear(ll.carrier))


def _identity_linear(space: FqSpace) -> FqLinearMap:
    from .linfq import identity_linear

    return identity_linear(space.q, space.dim)


def compose_ll_morphisms(f: LLMorphism, g: LLMorphism) -> LLMorphism:
    """f o g for g: C -> B and f: B -> A; the lax law is re-checked on the
    composite rather than assumed closed under composition."""
    if g.dst != f.src:
        raise StructureError("morphisms not composable")
    inv = tuple(g.underline.inverse_image.table[v]
                for v in f.underline.inverse_image.table)
    over = g.overline.compose(f.overline)
    return check_ll_morphism(g.src, f.dst, inv, over)


def spec_on_morphism(f: LLMorphism) -> BundleMorphism:
    """Spec on arrows: direct image restricted to primes, same linear map."""
    src_b = spec_bundle(f.src)
    dst_b = spec_bundle(f.dst)
    flat = spectrum_map(f.underline)
    # spectrum_map produces spaces equal to the bundles' bases
    flat = CtsMap(src_b.base, dst_b.base, flat.table)
    out = check_morphism(src_b, dst_b, flat, f.overline)
    if f.strict and not out.strict:
        raise InternalCheckError("Spec of a strict morphism must be strict")
    return out


def omega_on_morphism(f: BundleMorphism) -> LLMorphism:
    """Omega on arrows: inverse image is the base-map preimage."""
    src_ll = omega_linloc(f.src)
    dst_ll = omega_linloc(f.dst)
    src_opens = f.src.base
    inv = tuple(src_ll.frame.lattice.index[src_opens.open_id(f.f_flat.preimage(o))]
                for o in f.dst.base.opens)
    out = check_ll_morphism(src_ll, dst_ll, inv, f.f_star)
    if f.strict and not out.strict:
        raise InternalCheckError("Omega of a strict morphism must be strict")
    return out


# --- unit, counit, transposition ----------------------------------------------


@dataclass(frozen=True)
class UnitReport:
    morphism: BundleMorphism
    is_iso: bool


def unit_sob(bundle: QVBundle) -> UnitReport:
    """sob as a strict morphism into the spectrum of the packaged locale;
    an isomorphism exactly when the bundle is sober."""
    ll = omega_linloc(bundle)
    target = spec_bundle(ll)
    sob, _, _ = soberify(bundle.base)
    flat = CtsMap(bundle.base, target.base, sob.table)
    mor = check_morphism(bundle, target, flat, _identity_linear(bundle.carrier))
    if not mor.strict:
        raise InternalCheckError("unit must be strict")
    iso = sob.is_injective() and sob.is_surjective()
    cls = classify_bundle(bundle)
    if iso != cls.sober:
        raise InternalCheckError("unit iso flag must match soberness")
    return UnitReport(mor, iso)


@dataclass(frozen=True)
class CounitReport:
    morphism: LLMorphism
    is_iso: bool


def counit_spat(ll: LinLocale) -> CounitReport:
    """Spatialization as a strict morphism Omega(Spec(ll)) -> ll."""
    from .frame import spatialization

    src = omega_linloc(spec_bundle(ll))
    spat = spatialization(ll.frame)
    inv = tuple(spat.assignment.table)
    mor = check_ll_morphism(src, ll, inv, _identity_linear(ll.carrier))
    # strictness here is exactly the identity: repackaged support of V
    # equals U_{sigma(V)}; assert it elementwise as well
    for i in range(src.sub_lattice.n):
        if src.support_table[i] != inv[ll.support_table[i]]:
            raise InternalCheckError("repackaged support differs from U_{sigma(V)}")
    if not mor.strict:
        raise InternalCheckError("counit must be strict")
    iso = spat.is_spatial
    if not iso:
        raise InternalCheckError("finite frames are spatial; counit must be iso")
    return CounitReport(mor, iso)


@dataclass(frozen=True)
class TransposeReport:
    morphism: LLMorphism
    round_trip_ok: bool
    uniqueness: str  # "unique" | "unverified"
    candidates_checked: int


def adjunction_transpose(f: BundleMorphism, target_ll: LinLocale,
                         cap: int | None = None) -> TransposeReport:
    """Transpose a bundle morphism into Spec(target) to a morphism of
    linearized locales out of the packaged source.

    The inverse image sends d to the base preimage of U_d; the round trip
    Spec(transpose) o sob = f is verified, and uniqueness among all locale
    maps paired with the same linear part is established by exhaustive
    search when within the cap."""
    if f.dst != spec_bundle(target_ll):
        raise StructureError("morphism target is not the spectrum of the locale")
    src_ll = omega_linloc(f.src)
    lat_b = target_ll.frame.lattice
    prime_pos = {p: k for k, p in enumerate(target_ll.frame.primes)}
    inv = []
    for d in range(lat_b.n):
        u_d = mask_of(k for p, k in prime_pos.items() if not lat_b.leq(d, p))
        pre = f.f_flat.preimage(u_d)
        inv.append(src_ll.frame.lattice.index[f.src.base.open_id(pre)])
    mor = check_ll_morphism(src_ll, target_ll, tuple(inv), f.f_star)
    if f.strict and not mor.strict:
        raise InternalCheckError("transpose of a strict morphism must be strict")
    round_trip = _round_trip_equals(mor, f)
    if not round_trip:
        raise InternalCheckError("Spec(transpose) o sob != original morphism")
    total = src_ll.frame.lattice.n ** lat_b.n
    if total > resolve_cap(cap):
        return TransposeReport(mor, True, "unverified", 0)
    matches = 0
    checked = 0
    for table in product(range(src_ll.frame.lattice.n), repeat=lat_b.n):
        try:
            cand = check_ll_morphism(src_ll, target_ll, table, f.f_star)
        except (ValueError, PreservationError):
            continue
        checked += 1
        if _round_trip_equals(cand, f):
            matches += 1
    uniqueness = "unique" if matches == 1 else f"non-unique({matches})"
    if matches != 1:
        raise InternalCheckError(f"transpose not unique: {matches} matches")
    return TransposeReport(mor, True, uniqueness, checked)


def _round_trip_equals(mor: LLMorphism, f: BundleMorphism) -> bool:
    spec_mor = spec_on_morphism(mor)
    unit = unit_sob(f.src)
    composite_flat = spec_mor.f_flat.compose(unit.morphism.f_flat)
    composite_star = unit.morphism.f_star.compose(spec_mor.f_star)
    return (composite_flat.table == f.f_flat.table
            and composite_star.matrix == f.f_star.matrix)


# --- hom-set enumeration and the adjunction census ----------------------------


def enumerate_ll_morphisms(src: LinLocale, dst: LinLocale,
                           cap: int | None = None) -> list[LLMorphism]:
    homs = enumerate_frame_homs(dst.frame.lattice, src.frame.lattice, cap)
    stars = enumerate_linear_maps(dst.carrier.q, dst.carrier.dim, src.carrier.dim, cap)
    out = []
    for h in homs:
        for s in stars:
            lax, _, _, _ = ll_lax_law(src, dst, h.table, s)
            if lax:
                out.append(check_ll_morphism(src, dst, h.table, s))
    return out


@dataclass(frozen=True)
class AdjunctionCensus:
    bundle_side: int
    linloc_side: int
    bijection: bool
    strict_bundle_side: int
    strict_linloc_side: int
    strict_bijection: bool
    all_unique: bool
    unit_iso: bool
    counit_iso: bool
    triangles_ok: bool

    def to_json(self):
        return {"hom_bundle_side": self.bundle_side,
                "hom_linloc_side": self.linloc_side,
                "bijection": self.bijection,
                "strict_bundle_side": self.strict_bundle_side,
                "strict_linloc_side": self.strict_linloc_side,
                "strict_bijection": self.strict_bijection,
                "transposes_unique": self.all_unique,
                "unit_iso": self.unit_iso,
                "counit_iso": self.counit_iso,
                "triangle_identities": self.triangles_ok}


def adjunction_census(bundle: QVBundle, ll: LinLocale,
                      cap: int | None = None) -> AdjunctionCensus:
    """Exhaustive verification of the adjunction on one (bundle, locale) pair:
    hom-set bijection through the transpose, strict restriction, uniqueness
    certificates, unit/counit iso flags, and both triangle identities."""
    target = spec_bundle(ll)
    bundle_homs = _bundle_homs_into_spec(bundle, target, cap)
    ll_src = omega_linloc(bundle)
    ll_homs = enumerate_ll_morphisms(ll_src, ll, cap)
    transposed = []
    all_unique = True
    for f in bundle_homs:
        rep = adjunction_transpose(f, ll, cap)
        transposed.append(rep.morphism)
        all_unique = all_unique and rep.uniqueness == "unique"
    keys_t = {m.key() for m in transposed}
    keys_l = {m.key() for m in ll_homs}
    bijection = (len(keys_t) == len(transposed) and keys_t == keys_l)
    strict_t = {m.key() for m, f in zip(transposed, bundle_homs) if f.strict}
    strict_l = {m.key() for m in ll_homs if m.strict}
    strict_bijection = strict_t == strict_l
    # strictness must transfer both ways across the transpose
    for m, f in zip(transposed, bundle_homs):
        if m.strict != f.strict:
            raise InternalCheckError("strictness not preserved by transposition")
    unit = unit_sob(bundle)
    counit = counit_spat(ll)
    triangles = _triangle_identities(bundle, ll)
    cls = classify_bundle(bundle)
    if unit.is_iso != cls.sober:
        raise InternalCheckError("unit iso flag must equal soberness")
    return AdjunctionCensus(len(bundle_homs), len(ll_homs), bijection,
                            len(strict_t), len(strict_l), strict_bijection,
                            all_unique, unit.is_iso, counit.is_iso, triangles)


def _bundle_homs_into_spec(bundle: QVBundle, target: QVBundle,
                           cap: int | None = None) -> list[BundleMorphism]:
    from .bundle import enumerate_bundle_morphisms

    return enumerate_bundle_morphisms(bundle, target, cap)


def _triangle_identities(bundle: QVBundle, ll: LinLocale) -> bool:
    from .bundle import compose_morphisms

    # Spec(counit) o unit_{Spec ll} = id on Spec ll
    sb = spec_bundle(ll)
    counit = counit_spat(ll)
    unit_sb = unit_sob(sb)
    first = compose_morphisms(spec_on_morphism(counit.morphism), unit_sb.morphism)
    if not (first.f_flat.table == tuple(range(sb.base.n)) and first.f_star.is_identity()):
        return False
    # counit_{Omega bundle} o Omega(unit_bundle) = id on Omega bundle
    ll_a = omega_linloc(bundle)
    omega_unit = omega_on_morphism(unit_sob(bundle).morphism)
    second = compose_ll_morphisms(counit_spat(ll_a).morphism, omega_unit)
    return (second.underline.inverse_image.table == tuple(range(ll_a.frame.lattice.n))
            and second.overline.is_identity())


# --- Max-linearized variant ----------------------------------------------------


@dataclass(frozen=True)
class MaxVariantReport:
    is_max_linearized: bool
    gamma_in_max: bool
    sigma_closure_invariant: bool
    comparable_primes_equal: bool | None

    def to_json(self):
        return {"is_max_linearized": self.is_max_linearized,
                "gamma_valued_in_closed_subspaces": self.gamma_in_max,
                "support_constant_on_closures": self.sigma_closure_invariant,
                "comparable_primes_equal_restriction": self.comparable_primes_equal}


def max_variant_check(ll: LinLocale) -> MaxVariantReport:
    """Max-linearized iff the right adjoint lands in closed subspaces iff
    the support map is closure-invariant; both are computed and compared."""
    mx: MaxReport = max_subspaces(ll.carrier)
    closed = set(mx.closed_indices)
    gamma_in_max = all(v in closed for v in ll.restriction_map.table)
    sigma_closure = all(ll.support_table[i] == ll.support_table[mx.closure_table[i]]
                        for i in range(ll.sub_lattice.n))
    if gamma_in_max != sigma_closure:
        raise InternalCheckError("the two Max-linearization criteria disagree")
    comparable = None
    if gamma_in_max:
        comparable = True
        lat = ll.frame.lattice
        for i, p in enumerate(ll.frame.primes):
            for j, q in enumerate(ll.frame.primes):
                if lat.leq(p, q) and ll.kernel_table[i] != ll.kernel_table[j]:
                    comparable = False
        if not comparable:
            raise InternalCheckError(
                "Max-linearized locale with unequal restriction on comparable primes")
    return MaxVariantReport(gamma_in_max, gamma_in_max, sigma_closure, comparable)
