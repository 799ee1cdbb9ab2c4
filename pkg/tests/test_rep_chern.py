import numpy as np
import pytest

from d8tetra import rep_chern as rc
from d8tetra.index_ring import parse_ideal
from d8tetra.zg_modules import OrderMismatch


def test_cyclotomic_polynomials():
    assert rc.cyclotomic(1) == (-1, 1)
    assert rc.cyclotomic(4) == (1, 0, 1)
    assert rc.cyclotomic(6) == (1, -1, 1)
    assert rc.cyclotomic(8) == (1, 0, 0, 0, 1)


def test_cyclo_reduce_sum_of_roots_is_zero():
    assert rc.cyclo_reduce([1, 1, 1, 1], 4) == (0, 0)


def test_decompositions():
    assert str(rc.decompose(rc.u4_rep())) == "V^1 + R^-"
    assert str(rc.decompose(rc.u2_rep())) == "R^-"
    assert str(rc.decompose(rc.real_direct_sum(rc.u4_rep(), rc.u2_rep()))) == "V^1 + V^2"
    assert str(rc.decompose(rc.trivial_rep())) == "R"


def test_sign_lines_pair():
    s = rc.RepSum.of(4, [], real_sign=3)
    assert s.lines == (2,) and s.real_sign == 1


@pytest.mark.parametrize("rep", [rc.u4_rep, rc.u2_rep, lambda: rc.real_direct_sum(rc.u4_rep(), rc.u2_rep())])
def test_characters_match_traces(rep):
    r = rep()
    d = rc.decompose(r)
    for g in range(4):
        vec = [0] * 4
        vec[0] = r.trace_of_power(g)
        assert d.character(g) == rc.cyclo_reduce(vec, 4)


def test_decompose_regular_rep_of_z8():
    # R[Z8] = R + R^- + V^1 + V^2 + V^3
    perm = np.roll(np.eye(8, dtype=int), 1, axis=0)
    d = rc.decompose(rc.RealRep(8, perm))
    assert d.lines == (1, 2, 3) and d.real_trivial == 1 and d.real_sign == 1


def test_chern_classes():
    v = rc.RepSum.of(4, [1, 2])
    assert str(rc.chern_top(v)) == "2U^2"
    assert str(rc.total_chern(v)) == "1 + 3U + 2U^2"
    assert str(rc.chern_top(rc.RepSum.of(4, [1, 1]))) == "U^2"
    with pytest.raises(ValueError):
        rc.chern_top(rc.decompose(rc.u4_rep()))


def test_sphere_index():
    assert rc.test_rep_index() == parse_ideal("<2U^2>")
    assert rc.test_rep_index("F2").is_zero()
    with pytest.raises(rc.TrivialSummand):
        rc.sphere_index(rc.RepSum.of(4, [1], real_trivial=2))


def test_line_tensor():
    assert rc.line_tensor(1, 1) == 2
    assert rc.line_tensor(3, 2) == 1


def test_order_checks():
    with pytest.raises(OrderMismatch):
        rc.RealRep(2, [[0, -1], [1, 0]])
    with pytest.raises(OrderMismatch):
        rc.real_direct_sum(rc.trivial_rep(2), rc.trivial_rep(4))
    with pytest.raises(ValueError):
        rc.restrict_to_subspace([[0, 1], [1, 0]], [[1], [0]], 2)
