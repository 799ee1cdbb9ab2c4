import pytest

from d8tetra.cyclic_cohomology import (
    ShortExactSequence, alpha_sequence, bockstein_verify, cohomology, connecting_map, les_verify, norm_sequence,
    shapiro_check, u_action,
)
from d8tetra.exact_linalg import FinAbGroup
from d8tetra.zg_modules import named_module

Z, Z2, Z4, ZERO = FinAbGroup(1), FinAbGroup(0, (2,)), FinAbGroup(0, (4,)), FinAbGroup()


def test_trivial_module_is_periodic():
    tab = cohomology(named_module("trivial"), 9)
    assert tab.as_list() == [Z, ZERO, Z4, ZERO, Z4, ZERO, Z4, ZERO, Z4, ZERO]


def test_regular_module_is_cohomologically_trivial():
    assert cohomology(named_module("regular"), 9).as_list() == [Z] + [ZERO] * 9


@pytest.mark.parametrize("n,d", [(4, 2), (6, 3), (6, 2), (8, 4)])
def test_shapiro(n, d):
    assert shapiro_check(n, d, 7).matches


def test_m_and_n_and_l():
    m = cohomology(named_module("M"), 7)
    assert [str(g) for g in m.as_list()] == ["0", "Z/4", "0", "Z/4", "0", "Z/4", "0", "Z/4"]
    n = cohomology(named_module("N"), 5)
    assert n.as_list() == [ZERO, Z2, ZERO, Z2, ZERO, Z2]
    lmod = cohomology(named_module("L"), 4)
    assert lmod[0] == Z


def test_u_action_on_m_is_an_isomorphism():
    m = named_module("M")
    for p in (1, 3, 5):
        assert u_action(m, p).tolist() in ([[1]], [[3]])


def test_u_action_on_trivial_degree_zero():
    # Z -> Z/4 is the surjection onto the generator
    assert u_action(named_module("trivial"), 0).tolist() in ([[1]], [[3]])


def test_f2_coefficients():
    tab = cohomology(named_module("trivial"), 4, "F2")
    assert tab.as_list() == [Z2] * 5
    with pytest.raises(ValueError):
        cohomology(named_module("trivial"), -1)


@pytest.mark.parametrize("seq", [norm_sequence, alpha_sequence])
def test_long_exact_sequences(seq):
    report = les_verify(seq(), 8)
    assert report.ok and len(report.positions) > 20


def test_connecting_map_norm_sequence():
    # delta: H^1(M) = Z/4 -> H^2(Z) = Z/4 is an isomorphism
    delta = connecting_map(norm_sequence(), 1)
    assert delta.tolist() in ([[1]], [[3]])


def test_bockstein():
    assert bockstein_verify(2, 6).ok
    assert bockstein_verify(4, 6).ok


def test_bad_sequence_is_rejected():
    z, reg = named_module("trivial"), named_module("regular")
    bad = ShortExactSequence(z, reg, named_module("M"), [[1], [0], [0], [0]],
                             [[1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]])
    with pytest.raises(ValueError):
        bad.check()


def test_table_rows_have_cocycles():
    rows = cohomology(named_module("N"), 3).rows()
    assert rows[1]["group"] == "Z/2" and rows[1]["cocycles"]
