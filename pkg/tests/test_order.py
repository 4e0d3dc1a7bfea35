import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfk import corpus
from pfk.caps import CapExceeded
from pfk.order import (LatticeMap, PreservationError, StructureError, adjoint,
                       enumerate_join_preserving_maps, identity_map, join_meet,
                       lattice_map, make_poset, map_props, validate_lattice,
                       verify_adjunction)


def test_chain_is_frame(c3):
    rep = validate_lattice(c3, "frame")
    assert rep.ok
    assert [c.status for c in rep.checks] == ["pass"] * len(rep.checks)


def test_m3_fails_frame_with_three_atom_witness(m3):
    rep = validate_lattice(m3, "frame")
    assert not rep.ok
    bad = rep.failed[0]
    assert bad.name == "meet distributes over arbitrary joins"
    assert bad.witness == {"a": "a", "B": ["b", "c"], "lhs": "a", "rhs": "0"}


def test_m3_is_still_a_suplattice(m3):
    assert validate_lattice(m3, "suplattice").ok


def test_sub_f2_2_fails_frame_with_line_witness():
    from pfk.linfq import FqSpace, enumerate_subspaces

    sl = enumerate_subspaces(FqSpace(2, 2))
    rep = validate_lattice(sl.lattice, "frame")
    assert not rep.ok
    w = rep.failed[0].witness
    assert w["a"] == "1:01" and w["B"] == ["1:10", "1:11"]


def test_duplicate_ids_is_structural_error():
    with pytest.raises(StructureError):
        make_poset(("a", "a"), [])


def test_cycle_is_structural_error():
    with pytest.raises(StructureError):
        make_poset(("a", "b"), [("a", "b"), ("b", "a")])


def test_join_meet_basics(c3):
    assert join_meet(c3, ["0", "m"], "join") == "m"
    assert join_meet(c3, [], "join") == "0"
    assert join_meet(c3, [], "meet") == "1"
    with pytest.raises(StructureError):
        join_meet(c3, ["nope"], "join")


def test_join_of_lines_is_plane():
    from pfk.linfq import FqSpace, enumerate_subspaces

    sl = enumerate_subspaces(FqSpace(2, 2))
    assert join_meet(sl.lattice, ["1:01", "1:10"], "join") == "2:1001"


def test_adjoint_of_chain_map(c3):
    c2 = corpus.chain(2)
    f = lattice_map(c3, c2, {"0": "c0", "m": "c1", "1": "c1"})
    g = adjoint(f)
    assert g.to_json() == {"c0": "0", "c1": "1"}
    ok, _ = verify_adjunction(f, g)
    assert ok


def test_adjoint_of_identity_is_identity(c3):
    assert adjoint(identity_map(c3)).table == (0, 1, 2)


def test_adjoint_rejects_non_join_preserving(c3):
    f = lattice_map(c3, c3, {"0": "1", "m": "1", "1": "1"})
    with pytest.raises(PreservationError) as e:
        adjoint(f)
    assert e.value.witness["subset"] == []  # empty join not preserved


def test_left_adjoint_of_meet_preserving(c3):
    c2 = corpus.chain(2)
    g = lattice_map(c2, c3, {"c0": "0", "c1": "1"})
    f = adjoint(g, "left_of_meet_preserving")
    ok, _ = verify_adjunction(f, g)
    assert ok


def test_sub_projection_right_adjoint_is_preimage():
    from pfk.linfq import (FqSpace, enumerate_subspaces, linear_map,
                           preimage_map, sub_map)

    proj = linear_map(2, 2, 1, [[1, 0]])
    s2 = enumerate_subspaces(FqSpace(2, 2))
    s1 = enumerate_subspaces(FqSpace(2, 1))
    fwd = sub_map(proj, s2, s1)
    g = adjoint(fwd)
    assert g.table == preimage_map(proj, s2, s1).table
    # the kernel line is the preimage of the zero subspace
    assert s2.subspaces[g.table[s1.index_of["0:"]]].key == "1:01"


def test_verify_adjunction_failure_witness():
    c2 = corpus.chain(2)
    swap = LatticeMap(c2, c2, (1, 0))
    ok, w = verify_adjunction(swap, identity_map(c2))
    assert not ok
    # the witness is a genuine mismatch of the adjunction equivalence
    a, b = c2.index[w["a"]], c2.index[w["b"]]
    assert c2.leq(swap.table[a], b) != c2.leq(a, b)


def test_verify_adjunction_mismatch_raises(c3):
    c2 = corpus.chain(2)
    with pytest.raises(StructureError):
        verify_adjunction(identity_map(c3), identity_map(c2))


def test_map_props_scan_is_the_oracle(c3):
    c2 = corpus.chain(2)
    f = lattice_map(c3, c2, {"0": "c0", "m": "c1", "1": "c1"})
    props = map_props(f)
    assert props.monotone and props.join_preserving
    # the exhaustive scan decides the meet flags for this map
    assert props.finite_meet_preserving and props.all_meet_preserving


def test_map_props_constant_top_fails_empty_join(c3):
    f = lattice_map(c3, c3, {"0": "1", "m": "1", "1": "1"})
    props = map_props(f)
    assert props.monotone
    assert not props.join_preserving
    assert props.witnesses["join_preserving"]["subset"] == []


def test_map_props_identity_all_true(c3):
    props = map_props(identity_map(c3))
    assert (props.monotone and props.join_preserving
            and props.finite_meet_preserving and props.all_meet_preserving)


def test_every_join_preserving_map_has_verified_right_adjoint():
    src = corpus.diamond_m3()
    tgt = corpus.chain(3)
    maps = enumerate_join_preserving_maps(src, tgt)
    assert maps
    for f in maps:
        ok, w = verify_adjunction(f, adjoint(f))
        assert ok, w


def test_adjoint_is_antitone():
    src = corpus.chain(3)
    tgt = corpus.chain(3)
    maps = enumerate_join_preserving_maps(src, tgt)
    for f in maps:
        for f2 in maps:
            if all(tgt.leq(a, b) for a, b in zip(f.table, f2.table)):
                g, g2 = adjoint(f), adjoint(f2)
                assert all(src.leq(a, b) for a, b in zip(g2.table, g.table))


def test_enumeration_cap():
    b4 = corpus.boolean_lattice(4)
    with pytest.raises(CapExceeded):
        enumerate_join_preserving_maps(b4, b4, cap=1000)


@st.composite
def small_lattices(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    rel = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                        max_size=6))
    return corpus.downset_lattice(n, rel)


@given(small_lattices(), st.data())
@settings(max_examples=60, deadline=None)
def test_join_meet_laws_on_random_distributive(lat, data):
    ids = list(lat.elements)
    a = data.draw(st.sampled_from(ids))
    b = data.draw(st.sampled_from(ids))
    c = data.draw(st.sampled_from(ids))
    assert join_meet(lat, [a, a], "join") == a
    assert join_meet(lat, [a, b], "join") == join_meet(lat, [b, a], "join")
    ab_c = join_meet(lat, [join_meet(lat, [a, b], "join"), c], "join")
    a_bc = join_meet(lat, [a, join_meet(lat, [b, c], "join")], "join")
    assert ab_c == a_bc == join_meet(lat, [a, b, c], "join")


@given(small_lattices())
@settings(max_examples=40, deadline=None)
def test_downset_lattices_are_frames(lat):
    assert validate_lattice(lat, "frame").ok
