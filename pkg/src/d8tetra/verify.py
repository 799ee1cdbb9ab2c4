"""The full algebraic chain as a list of named checks, plus table emission."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

from .cyclic_cohomology import alpha_sequence, cohomology, les_verify, norm_sequence, shapiro_check, u_action
from .exact_linalg import FinAbGroup
from .index_ring import (
    F2_RING, Verdict, contains, ideal_contains_ideal, mod2_reduce_ideal, no_map_verdict, parse_ideal,
)
from .pair_homology import dual_cohomology, identify_module, relative_table, standard_candidates
from .rep_chern import decompose, sphere_index, test_rep_u4xu2
from .spectral import (
    DifferentialLedger, case_fiber, default_ledger, e2_for_case, edge_index, run_ledger, run_pages,
)
from .zg_modules import named_module


@dataclass
class StepResult:
    name: str
    claim: str
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    steps: list[StepResult] = field(default_factory=list)
    verdicts: dict[str, str] = field(default_factory=dict)
    aborted_at: str | None = None

    @property
    def ok(self) -> bool:
        return self.aborted_at is None and all(s.passed for s in self.steps)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "aborted_at": self.aborted_at, "verdicts": self.verdicts,
                "steps": [asdict(s) for s in self.steps]}

    def lines(self) -> list[str]:
        out = [f"[{'PASS' if s.passed else 'FAIL'}] {s.name}: {s.claim}" + (f" ({s.detail})" if s.detail else "")
               for s in self.steps]
        for case, v in self.verdicts.items():
            out.append(f"verdict {case}: {v}")
        return out


def _groups(table, upto):
    return [str(table[p]) for p in range(upto + 1)]


def check_cohomology_tables(max_degree: int = 9) -> tuple[bool, str]:
    z, z4, z2 = FinAbGroup(1, ()), FinAbGroup(0, (4,)), FinAbGroup(0, (2,))
    zero = FinAbGroup(0, ())
    ok = True
    msgs = []
    triv = cohomology(named_module("trivial"), max_degree)
    want = [z] + [z4 if p % 2 == 0 else zero for p in range(1, max_degree + 1)]
    ok &= triv.as_list() == want
    reg = cohomology(named_module("regular"), max_degree)
    ok &= reg.as_list() == [z] + [zero] * max_degree
    ok &= shapiro_check(4, 2, max_degree).matches
    m = cohomology(named_module("M"), max_degree + 2)
    ok &= all(m[p] == (z4 if p % 2 else zero) for p in range(max_degree + 1))
    ok &= all(u_action(named_module("M"), p, table=m).tolist() in ([[1]], [[3]])
              for p in range(1, max_degree + 1, 2))
    n = cohomology(named_module("N"), max_degree)
    ok &= all(n[p] == (z2 if p % 2 else zero) for p in range(max_degree + 1))
    msgs.append("trivial: " + ",".join(_groups(triv, min(max_degree, 4))) + ",...")
    ok &= les_verify(norm_sequence(), min(max_degree, 8)).ok
    ok &= les_verify(alpha_sequence(), min(max_degree, 8)).ok
    return bool(ok), "; ".join(msgs)


EXPECTED_RANKS = {2: {2: 2, 4: 5, 6: 4, 8: 1}, 1: {1: 2, 2: 5, 3: 4, 4: 1}}

EXPECTED_DUAL = {
    2: {0: "trivial", 2: "regular", 4: "M+coset2", 6: "N"},
    1: {0: "trivial", 1: "regular", 2: "M+N", 3: "N"},
}


def check_pair_homology(factor: int) -> tuple[bool, str]:
    """Relative homology and cohomology of the configuration space, identified up to isomorphism."""
    table = relative_table(factor)
    cands = standard_candidates()
    ranks = {k: m.rank for k, m in table.modules.items()}
    dual = {k: identify_module(m, cands).name for k, m in dual_cohomology(table).items()}
    euler = table.euler_characteristic()
    ok = ranks == EXPECTED_RANKS[factor] and dual == EXPECTED_DUAL[factor]
    ok &= euler == (12 if factor == 2 else 0)
    if factor == 2:
        ok &= identify_module(table[2], cands).name == "N"
        ok &= identify_module(table[4], cands).name == "M+coset2"
    return ok, f"ranks {ranks}; cohomology {dual}; euler {euler}"


def check_e2_against_oracle(case: str = "sphere-z", p_max: int = 10) -> tuple[bool, str]:
    """Every E2 entry equals H^p of the full (unsplit) fiber module in row q."""
    e2 = e2_for_case(case)
    space = case.split("-")[0]
    coeff = "F2" if case.endswith("f2") else "Z"
    modules = dual_cohomology(relative_table(2 if space == "sphere" else 1))
    for q, m in modules.items():
        tab = cohomology(m, p_max, coeff)
        for p in range(p_max + 1):
            if e2.group((p, q)) != tab[p]:
                return False, f"mismatch at ({p},{q})"
    return True, f"rows {sorted(modules)} through p={p_max}"


def verify_all(max_degree: int = 12, ledger: DifferentialLedger | None = None,
               stop_on_failure: bool = True) -> VerifyReport:
    """Run the full chain; stops at the first failing step unless told otherwise."""
    report = VerifyReport()
    bound = max(max_degree, 6)

    def step(name, claim, fn):
        if report.aborted_at is not None:
            return None
        try:
            passed, detail = fn()
        except Exception as exc:  # a step failure is reported, not raised
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        report.steps.append(StepResult(name, claim, bool(passed), detail))
        if not passed and stop_on_failure:
            report.aborted_at = name
        return passed

    step("cohomology", "H^*(Z4; trivial, regular, coset2, M, N) and both long exact sequences",
         lambda: check_cohomology_tables(min(max_degree, 9)))
    step("pair-homology-sphere", "H_*(X, Y) for four spheres and the dual cohomology modules",
         lambda: check_pair_homology(2))
    step("pair-homology-circle", "H_*(X, Y) for four circles and the dual cohomology modules",
         lambda: check_pair_homology(1))
    step("e2", "E2 entries agree with cohomology of the fiber modules", check_e2_against_oracle)

    sphere_ledger = ledger or default_ledger("sphere-z")
    state = {}

    def ledger_step():
        final = run_ledger(e2_for_case("sphere-z"), sphere_ledger)
        state["final"] = final
        return True, f"E_{final.r} vanishes above total degree 8 for p <= 10"

    step("ledger", "the differential ledger kills every entry of total degree > 8", ledger_step)

    def index_step():
        idx = edge_index(state["final"], bound=bound)
        state["index"] = idx
        return idx == parse_ideal("<U^3>", degree_bound=bound), str(idx)

    step("edge-index", "Index(Omega) = <U^3>", index_step)

    def chern_step():
        rep = decompose(test_rep_u4xu2())
        idx = sphere_index(rep, bound)
        state["target"] = idx
        return idx == parse_ideal("<2U^2>", degree_bound=bound), f"{rep} -> {idx}"

    step("chern", "Index S(U4 x U2) = <2U^2>", chern_step)

    def verdict_step():
        inside = contains(state["index"], "2U^2")
        v = no_map_verdict(state["index"], state["target"])
        report.verdicts["sphere-Z"] = v.value
        return (not inside) and v is Verdict.NO_EQUIVARIANT_MAP, f"2U^2 in index: {inside}; {v.value}"

    step("verdict-sphere-z", "no equivariant map Omega -> S(U4 x U2)", verdict_step)

    def f2_step():
        reduced = mod2_reduce_ideal(state["target"])
        final = run_ledger(e2_for_case("sphere-f2"), default_ledger("sphere-f2"))
        idx = edge_index(final, bound=bound)
        v = no_map_verdict(idx, reduced)
        report.verdicts["sphere-F2"] = v.value
        ok = reduced.is_zero() and idx == parse_ideal("<eu^2, u^3>", F2_RING, bound)
        return ok and v is Verdict.INCONCLUSIVE, f"target {reduced}; index {idx}; {v.value}"

    step("f2", "mod 2 the target index vanishes, so the F2 index gives no obstruction", f2_step)

    def circle_step():
        final = run_ledger(e2_for_case("circle-z"), default_ledger("circle-z"))
        idx = edge_index(final, bound=bound)
        target = parse_ideal("<2U^2>", degree_bound=bound)
        v = no_map_verdict(idx, target)
        report.verdicts["circle-Z"] = v.value
        ok = idx == parse_ideal("<U^2>", degree_bound=bound) and ideal_contains_ideal(idx, target)
        return ok and v is Verdict.INCONCLUSIVE, f"index {idx}; {v.value}"

    step("square-peg", "for four circles the index contains <2U^2>, so no conclusion", circle_step)
    return report


# -- tables -----------------------------------------------------------------------

def case_pages(case: str, ledger: DifferentialLedger | None = None):
    return run_pages(e2_for_case(case), ledger or default_ledger(case))


def emit_tables(case: str, fmt: str = "ascii", p_limit: int = 10,
                ledger: DifferentialLedger | None = None) -> str:
    """Render every page of a case as ascii, csv (one row per page, p, q) or json."""
    from .spectral import page_to_ascii, page_to_json
    pages = case_pages(case, ledger)
    if fmt == "ascii":
        return "\n\n".join(page_to_ascii(p, p_limit) for p in pages) + "\n"
    if fmt == "json":
        return json.dumps({"case": case, "pages": [page_to_json(p) for p in pages]}, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["page", "p", "q", "group", "generators"])
        for page in pages:
            for pos in page.positions():
                if pos[0] > p_limit:
                    continue
                g = page.group(pos)
                w.writerow([page.r, pos[0], pos[1], str(g), ";".join(page.labels(pos))])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def cohomology_rows(module_name: str, coeff: str = "Z", max_degree: int = 12) -> list[dict]:
    return cohomology(named_module(module_name), max_degree, coeff).rows()


def fiber_summary(case: str) -> dict:
    fib = case_fiber(case)
    return {q: [f.name for f in fams] for q, fams in fib.rows.items()}
