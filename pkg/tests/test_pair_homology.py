import numpy as np
import pytest

from d8tetra.pair_homology import (
    PHI, PSI, ProductSpace, UnsupportedShape, charpoly, dual_cohomology, find_isomorphism, identify_module,
    pair_maps, product_homology, relative_table, standard_candidates,
)
from d8tetra.zg_modules import direct_sum, named_module


def test_product_homology_ranks_are_binomial():
    hx = product_homology(ProductSpace(2, 4))
    assert {k: m.rank for k, m in hx.items()} == {0: 1, 2: 4, 4: 6, 6: 4, 8: 1}
    hy = product_homology(ProductSpace(1, 2))
    assert {k: m.rank for k, m in hy.items()} == {0: 1, 1: 2, 2: 1}


def test_orientation_signs():
    assert ProductSpace(2, 4).orientation_sign() == 1
    assert ProductSpace(1, 4).orientation_sign() == -1


def test_unsupported_shape():
    with pytest.raises(UnsupportedShape):
        ProductSpace(3, 4)


def test_sphere_maps_match_hand_written_matrices():
    maps = pair_maps(2)
    assert maps[2].matrix.tolist() == PHI
    assert maps[4].matrix.tolist() == PSI
    assert all(f.certified and f.injective for f in maps.values())


def test_relative_table_sphere():
    t = relative_table(2)
    assert {k: m.rank for k, m in t.modules.items()} == {2: 2, 4: 5, 6: 4, 8: 1}
    assert t[3].rank == 0 and t[5].rank == 0
    assert t.euler_characteristic() == 12
    assert identify_module(t[2], standard_candidates()).name == "N"
    assert identify_module(t[4], standard_candidates()).name == "M+coset2"


def test_relative_table_circle():
    t = relative_table(1)
    assert {k: m.rank for k, m in t.modules.items()} == {1: 2, 2: 5, 3: 4, 4: 1}
    assert t.euler_characteristic() == 0


def test_dual_cohomology_sphere():
    dual = dual_cohomology(relative_table(2))
    want = {0: named_module("trivial"), 2: named_module("regular"),
            4: direct_sum(named_module("M"), named_module("coset2")), 6: named_module("N")}
    assert sorted(dual) == sorted(want)
    for k, m in want.items():
        assert find_isomorphism(dual[k], m) is not None


def test_dual_cohomology_circle_is_twisted():
    dual = dual_cohomology(relative_table(1))
    assert identify_module(dual[3], standard_candidates()).name == "N"
    assert identify_module(dual[0], standard_candidates()).name == "trivial"
    with pytest.raises(ValueError):
        dual_cohomology(relative_table(1), top=8)


def test_non_isomorphic_modules():
    assert find_isomorphism(named_module("N"), named_module("L")) is None
    assert find_isomorphism(named_module("coset2"), named_module("L")) is not None


def test_charpoly():
    assert charpoly(named_module("N").action) == [1, 0, 1]
    assert charpoly(np.eye(2, dtype=int)) == [1, -2, 1]
