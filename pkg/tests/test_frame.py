import pytest

from pfk import corpus
from pfk.frame import (FrameError, is_prime, make_locale, make_locale_map,
                       identity_locale_map, primes, spatialization,
                       spectrum_join_law_full, spectrum_map, spectrum_space)
from pfk.order import StructureError
from pfk.space import open_locale


@pytest.fixture(scope="module")
def c3loc():
    return corpus.c3_locale()


def test_make_locale_rejects_m3(m3):
    with pytest.raises(FrameError):
        make_locale(m3)


def test_primes_of_chain(c3loc):
    assert primes(c3loc) == ["0", "m"]


def test_primes_of_sierpinski_opens(sierpinski):
    loc = open_locale(sierpinski)
    assert primes(loc) == ["{}", "{x1}"]


def test_primes_of_two_point_powerset():
    loc = open_locale(corpus.discrete2())
    assert primes(loc) == ["{y0}", "{y1}"]  # complements of the singletons


def test_is_prime_top_clause(c3loc):
    ok, witness = is_prime(c3loc, "1")
    assert not ok and witness["reason"] == "p is the top element"


def test_is_prime_positive(sierpinski):
    loc = open_locale(sierpinski)
    ok, _ = is_prime(loc, "{x1}")
    assert ok


def test_is_prime_witness_in_discrete_five_points():
    from pfk.space import discrete_space

    space = discrete_space(tuple(f"p{i}" for i in range(5)))
    loc = open_locale(space)
    # complement of a two-point set: meet of the two co-singletons lands
    # under it while neither factor does
    ok, w = is_prime(loc, "{p2,p3,p4}")
    assert not ok
    assert set(w) == {"a", "b"}
    ok, _ = is_prime(loc, "{p1,p2,p3,p4}")
    assert ok


def test_is_prime_unknown_element(c3loc):
    with pytest.raises(StructureError):
        is_prime(c3loc, "zz")


def test_spectrum_of_chain_is_sierpinski_like(c3loc):
    sp = spectrum_space(c3loc)
    assert sp.points == ("0", "m")
    assert [sp.names(o) for o in sp.opens] == [[], ["0"], ["0", "m"]]


def test_spectrum_of_trivial_frame_is_empty():
    loc = corpus.trivial_frame_locale()
    assert spectrum_space(loc).points == ()
    assert spatialization(loc).is_spatial


def test_spectrum_of_vietoris_locale_has_five_points():
    from pfk.hyper import spectrum_topology
    from pfk.linfq import FqSpace

    viet = spectrum_topology(FqSpace(2, 2), "vietoris")
    loc = open_locale(viet.space)
    assert len(loc.primes) == 5


def test_spectrum_join_law_full_passes_on_corpus(c3loc):
    assert spectrum_join_law_full(c3loc).status == "pass"
    assert spectrum_join_law_full(open_locale(corpus.discrete2())).status == "pass"


def test_spatialization_bijective_on_finite_frames(c3loc):
    assert spatialization(c3loc).is_spatial
    assert spatialization(open_locale(corpus.sierpinski())).is_spatial
    assert spatialization(make_locale(corpus.boolean_lattice(3))).is_spatial


def test_locale_map_requires_frame_hom(c3loc):
    c2 = make_locale(corpus.chain(2))
    with pytest.raises(FrameError):
        make_locale_map(c2, c3loc, (1, 0, 1))  # not monotone, joins break


def test_spectrum_map_of_identity_is_identity(c3loc):
    f = identity_locale_map(c3loc)
    sm = spectrum_map(f)
    assert sm.table == tuple(range(len(c3loc.primes)))


def test_spectrum_map_collapses_both_primes(c3loc):
    # inverse image C3 -> O(D2): 0 |-> {}, m |-> X, 1 |-> X
    d2loc = open_locale(corpus.discrete2())
    lat = d2loc.lattice
    inv = (lat.index["{}"], lat.index["{y0,y1}"], lat.index["{y0,y1}"])
    f = make_locale_map(d2loc, c3loc, inv)
    sm = spectrum_map(f)
    assert [sm.target.points[v] for v in sm.table] == ["0", "0"]


def test_chain_iso_to_sierpinski_spectra(c3loc, sierpinski):
    sloc = open_locale(sierpinski)
    lat = sloc.lattice
    inv = (lat.index["{}"], lat.index["{x1}"], lat.index["{x0,x1}"])
    f = make_locale_map(sloc, c3loc, inv)
    sm = spectrum_map(f)
    assert sm.is_injective() and sm.is_surjective()


def test_prime_opens_are_unions_of_subbasic_sets():
    from pfk.space import generate_topology

    space = generate_topology(("a", "b", "c"), [0b011, 0b110])
    loc = open_locale(space)
    for p in loc.primes:
        mask = space.opens[p]
        union = 0
        for s in space.subbasis:
            if s & ~mask == 0:
                union |= s
        assert union == mask
