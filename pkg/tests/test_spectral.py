import json

import pytest

from d8tetra.index_ring import F2_RING, parse_ideal
from d8tetra.spectral import (
    CASES, SPHERE_Z_LEDGER, ConvergenceViolation, DifferentialLedger, MalformedRule, advance, build_e2, case_fiber,
    case_index, default_ledger, e2_for_case, edge_index, fiber_from_modules, forced_pattern_search, page_to_ascii,
    pages_to_json, parse_ledger, rule_differentials, run_ledger, run_pages, transition_check,
)
from d8tetra.verify import check_e2_against_oracle
from d8tetra.zg_modules import named_module


@pytest.mark.parametrize("case", CASES)
def test_e2_matches_cohomology_oracle(case):
    ok, detail = check_e2_against_oracle(case, 10)
    assert ok, detail


def test_e2_generator_labels():
    e2 = e2_for_case("sphere-z")
    assert e2.labels((1, 4)) == ["Lambda"]
    assert e2.labels((3, 6)) == ["T*Upsilon"]
    assert e2.labels((6, 0)) == ["U^3"]
    assert str(e2.group((2, 2))) == "0"
    assert str(e2.group((0, 2))) == "Z"


def test_fibers_are_verified_against_pair_homology():
    fib = case_fiber("sphere-z")
    assert sorted(fib.rows) == [0, 2, 4, 6]
    with pytest.raises(ValueError):
        case_fiber("torus-z")


@pytest.mark.parametrize("case,ideal,ring", [
    ("sphere-z", "<U^3>", None), ("sphere-f2", "<eu^2, u^3>", F2_RING), ("circle-z", "<U^2>", None)])
def test_case_indices(case, ideal, ring):
    idx, _ = case_index(case)
    assert idx == parse_ideal(ideal, ring, 12)


def test_empty_ledger_fails_at_lowest_offender():
    with pytest.raises(ConvergenceViolation) as err:
        run_ledger(e2_for_case("sphere-z"), DifferentialLedger([]))
    assert err.value.position == (3, 6)


def test_partial_ledger_fails():
    first_rule_only = parse_ledger(SPHERE_Z_LEDGER.splitlines()[0])
    with pytest.raises(ConvergenceViolation):
        run_ledger(e2_for_case("sphere-z"), first_rule_only)


def test_wrong_bidegree_is_malformed():
    with pytest.raises(MalformedRule) as err:
        parse_ledger("page=3 from=(1,6) gen=Upsilon to=(3,5) image=T*s range=i>=1")
    assert err.value.line == 1


def test_garbage_ledger_line():
    with pytest.raises(MalformedRule):
        parse_ledger("page=three")


def test_ledger_round_trip():
    ledger = default_ledger("sphere-z")
    again = parse_ledger("\n".join(r.to_line() for r in ledger.rules))
    assert [r.to_line() for r in again.rules] == [r.to_line() for r in ledger.rules]


def test_transition_and_d_squared():
    e2 = e2_for_case("sphere-z")
    ledger = default_ledger("sphere-z")
    page = e2
    for r in (2, 3, 4, 5):
        diffs = rule_differentials(page, [x for x in ledger.rules if x.page == r])
        nxt = advance(page, diffs)
        assert transition_check(page, nxt, diffs)
        page = nxt


def test_pages_have_increasing_index():
    pages = run_pages(e2_for_case("sphere-z"), default_ledger("sphere-z"))
    assert [p.r for p in pages] == list(range(2, 2 + len(pages)))
    assert pages[-1].is_zero((3, 6))


def test_custom_fiber_row_zero_only():
    e2 = build_e2(fiber_from_modules({0: named_module("trivial")}))
    idx = edge_index(run_ledger(e2, DifferentialLedger([])), bound=8)
    assert idx.is_zero()


def test_emission():
    pages = run_pages(e2_for_case("circle-z"), default_ledger("circle-z"))
    data = json.loads(pages_to_json(pages))
    assert data[0]["page"] == 2
    text = page_to_ascii(pages[0], 6)
    assert "E_2" in text


def test_forced_pattern_search_sphere():
    rep = forced_pattern_search(e2_for_case("sphere-z"), p_window=10)
    assert rep.unique and rep.kernel == "<U^3>"
    assert rep.to_dict()["unique"]


def test_forced_pattern_search_row_zero_only():
    rep = forced_pattern_search(build_e2(fiber_from_modules({0: named_module("trivial")})), p_window=6)
    assert rep.unique and rep.kernel == "<0>"


def test_search_window_limit():
    with pytest.raises(ValueError):
        forced_pattern_search(e2_for_case("sphere-z"), p_window=20)
