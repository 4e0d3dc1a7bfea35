import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfk.caps import CapExceeded
from pfk.linfq import (FqSpace, StructureError, brute_force_subspace_count,
                       enumerate_linear_maps, enumerate_subspaces, linear_map,
                       map_subspace, quotient_fiber, span, subspace_intersect,
                       subspace_sum, vector_from_str, vector_to_str,
                       verify_sub_preimage_adjunction, zero_subspace)
from pfk.order import validate_lattice


def test_q_must_be_prime():
    with pytest.raises(StructureError):
        FqSpace(4, 1)
    with pytest.raises(StructureError):
        FqSpace(9, 2)


def test_vector_string_roundtrip():
    assert vector_to_str((0, 1)) == "01"
    assert vector_from_str("01", 2, 2) == (0, 1)
    with pytest.raises(StructureError):
        vector_from_str("012", 2, 2)
    with pytest.raises(StructureError):
        vector_from_str("03", 2, 2)


def test_sum_of_independent_lines_is_plane():
    p01 = span(2, 2, [(0, 1)])
    p10 = span(2, 2, [(1, 0)])
    assert subspace_sum(p01, p10).key == "2:1001"


def test_intersection_via_stacked_constraints():
    p01 = span(2, 2, [(0, 1)])
    p11 = span(2, 2, [(1, 1)])
    assert subspace_intersect(p01, p11).key == "0:"
    w = span(2, 2, [(1, 0), (0, 1)])
    assert subspace_intersect(w, p11).key == "1:11"


def test_membership():
    p11 = span(2, 2, [(1, 1)])
    assert p11.contains((1, 1))
    assert not p11.contains((1, 0))


def test_dimension_mismatch():
    with pytest.raises(StructureError):
        subspace_sum(span(2, 2, [(0, 1)]), span(2, 1, [(1,)]))


@pytest.mark.parametrize("q,dim,count", [(2, 1, 2), (2, 2, 5), (2, 3, 16),
                                         (3, 1, 2), (3, 2, 6)])
def test_subspace_counts_match_brute_force(q, dim, count):
    sl = enumerate_subspaces(FqSpace(q, dim))
    assert sl.n == count
    assert brute_force_subspace_count(q, dim) == count


def test_canonical_order_of_sub_f2_2():
    sl = enumerate_subspaces(FqSpace(2, 2))
    assert [s.key for s in sl.subspaces] == ["0:", "1:01", "1:10", "1:11", "2:1001"]


def test_lattice_ops_agree_with_subspace_ops():
    sl = enumerate_subspaces(FqSpace(2, 2))
    for i, a in enumerate(sl.subspaces):
        for j, b in enumerate(sl.subspaces):
            assert sl.lattice.join_table[i][j] == sl.index_of[subspace_sum(a, b).key]
            assert sl.lattice.meet_table[i][j] == sl.index_of[subspace_intersect(a, b).key]


def test_sub_lattice_is_modular_not_distributive():
    sl = enumerate_subspaces(FqSpace(2, 2))
    lat = sl.lattice
    jt, mt = lat.join_table, lat.meet_table
    for a in range(lat.n):
        for b in range(lat.n):
            for c in range(lat.n):
                if lat.leq(a, c):
                    assert jt[a][mt[b][c]] == mt[jt[a][b]][c]
    assert not validate_lattice(lat, "frame").ok


def test_image_and_preimage_of_projection():
    proj = linear_map(2, 2, 1, [[1, 0]])
    p01 = span(2, 2, [(0, 1)])
    assert map_subspace(proj, p01, "image").key == "0:"
    assert map_subspace(proj, zero_subspace(2, 1), "preimage").key == "1:01"
    ident = linear_map(2, 2, 2, [[1, 0], [0, 1]])
    assert map_subspace(ident, p01, "image") == p01


def test_sub_map_adjunction():
    proj = linear_map(2, 2, 1, [[1, 0]])
    s2 = enumerate_subspaces(FqSpace(2, 2))
    s1 = enumerate_subspaces(FqSpace(2, 1))
    ok, w = verify_sub_preimage_adjunction(proj, s2, s1)
    assert ok, w


def test_quotient_fibers():
    a1 = FqSpace(2, 1)
    assert len(quotient_fiber(a1, zero_subspace(2, 1)).reps) == 2
    assert len(quotient_fiber(a1, span(2, 1, [(1,)])).reps) == 1
    a2 = FqSpace(2, 2)
    qf = quotient_fiber(a2, span(2, 2, [(0, 1)]))
    assert len(qf.reps) == 2
    assert qf.reduce((0, 1)) == (0, 0)


def test_reduce_is_linear_modulo_subspace():
    qf = quotient_fiber(FqSpace(3, 2), span(3, 2, [(1, 2)]))
    for a in qf.space.vectors:
        for b in qf.space.vectors:
            s = tuple((x + y) % 3 for x, y in zip(a, b))
            t = tuple((x + y) % 3 for x, y in zip(qf.reduce(a), qf.reduce(b)))
            assert qf.reduce(s) == qf.reduce(t)


def test_brute_force_cap():
    with pytest.raises(CapExceeded):
        brute_force_subspace_count(2, 5, cap=1000)


def test_enumerate_linear_maps_count():
    assert len(enumerate_linear_maps(2, 1, 1)) == 2
    assert len(enumerate_linear_maps(2, 2, 1)) == 4
    assert len(enumerate_linear_maps(3, 1, 2)) == 9


@given(st.sampled_from([(2, 2), (2, 3), (3, 2)]), st.data())
@settings(max_examples=40, deadline=None)
def test_span_is_a_closure_operator(params, data):
    q, dim = params
    space = FqSpace(q, dim)
    vecs = data.draw(st.lists(st.sampled_from(space.vectors), max_size=4))
    sp = span(q, dim, vecs)
    for v in vecs:
        assert sp.contains(v)
    assert span(q, dim, sp.members) == sp
    # sum with itself is itself, intersection with itself is itself
    assert subspace_sum(sp, sp) == sp
    assert subspace_intersect(sp, sp) == sp
