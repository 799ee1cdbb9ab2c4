"""Serre spectral sequence bookkeeping for the Borel construction of a Z_n-space.

Every page entry E_r^{p,q} is stored as a subquotient K_r / I_r of the E2
coordinate lattice Z^k, where k is the number of E2 generators at (p, q) and
the E2 relations (generator orders) sit inside every I_r.  A differential is a
matrix on E_r generator coordinates; applying it shrinks K at the source and
grows I at the target.  Differentials are supplied by a ledger of rules, or
enumerated by :func:`forced_pattern_search`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

from .cyclic_cohomology import cohomology, u_action
from .exact_linalg import FinAbGroup, Lattice, Subquotient, hom_kernel, int_matrix, matmul
from .index_ring import F2_RING, Z4_RING, GradedIdeal, coefficient_modulus, monomial
from .pair_homology import dual_cohomology, find_isomorphism, relative_table
from .zg_modules import Z4, CyclicGroupSpec, ZGModule, direct_sum, mod2_reduce, named_module

DEFAULT_P_MAX = 16
DEFAULT_CHECK_P = 10
NO_BOUND = 10**9


class MalformedRule(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class ConvergenceViolation(ArithmeticError):
    def __init__(self, positions: list[tuple[int, int]]):
        self.positions = positions
        self.position = positions[0]
        super().__init__(f"non-zero entries beyond the total-degree bound: {positions}")


class SearchBudgetExceeded(RuntimeError):
    pass


# -- fibers -------------------------------------------------------------------

@dataclass(frozen=True)
class Family:
    """A named summand of the fiber cohomology in one row.

    ``prefix`` is the letter used in generator labels (U^k*Lambda, T^k*s).
    """

    name: str
    module: ZGModule
    prefix: str = "T"


@dataclass
class Fiber:
    coeff: str
    rows: dict[int, list[Family]]
    name: str = ""
    total_bound: int = 0

    @property
    def row_zero(self) -> str:
        return self.rows[0][0].name


# Summand structure of H^q of the configuration space, verified against the
# pair-homology computation in :func:`case_fiber`.
_LAYOUT = {
    "sphere": {
        0: [("U", "trivial", "U")],
        2: [("R", "regular", "T")],
        4: [("Lambda", "M", "U"), ("s", "coset2", "T")],
        6: [("Upsilon", "N", "T")],
    },
    "circle": {
        0: [("U", "trivial", "U")],
        1: [("R", "regular", "T")],
        2: [("Lambda", "M", "U"), ("Theta", "N", "T")],
        3: [("Upsilon", "N", "T")],
    },
}

CASES = ("sphere-z", "sphere-f2", "circle-z")


def _layout_module(parts) -> ZGModule:
    mods = [named_module(kind) for _, kind, _ in parts]
    out = mods[0]
    for m in mods[1:]:
        out = direct_sum(out, m)
    return out


@lru_cache(maxsize=None)
def case_fiber(case: str) -> Fiber:
    """Fiber cohomology for a named case, checked against the computed H^*(Omega).

    Each computed module is matched to the direct sum of the named summands
    by an explicit integral equivariant isomorphism.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    space, coeff = case.split("-")
    factor = 2 if space == "sphere" else 1
    computed = dual_cohomology(relative_table(factor))
    layout = _LAYOUT[space]
    if sorted(computed) != sorted(layout):
        raise ArithmeticError(f"fiber rows {sorted(computed)} differ from the layout {sorted(layout)}")
    rows = {}
    for q, parts in layout.items():
        target = _layout_module(parts)
        if find_isomorphism(computed[q], target) is None:
            raise ArithmeticError(f"H^{q} is not isomorphic to {' + '.join(k for _, k, _ in parts)}")
        fams = []
        for fam, kind, prefix in parts:
            m = named_module(kind)
            if coeff == "f2":
                m = mod2_reduce(m)
                fam = "u" if q == 0 else fam
            fams.append(Family(fam, m, prefix))
        rows[q] = fams
    top = 4 * factor
    return Fiber("F2" if coeff == "f2" else "Z", rows, case, total_bound=top)


def fiber_from_modules(modules: dict[int, ZGModule], coeff: str = "Z", name: str = "custom",
                       total_bound: int | None = None) -> Fiber:
    """Fiber with one family per row, named ``row<q>`` (``U``/``u`` in row 0).

    Without ``total_bound`` no vanishing is imposed (the space need not be free).
    """
    total_bound = NO_BOUND if total_bound is None else total_bound
    rows = {}
    for q, m in sorted(modules.items()):
        if coeff == "F2" and m.coeff == "Z":
            m = mod2_reduce(m)
        fam = ("u" if coeff == "F2" else "U") if q == 0 else f"row{q}"
        rows[q] = [Family(fam, m, "U" if q == 0 else "T")]
    return Fiber(coeff, rows, name, total_bound)


# -- E2 -----------------------------------------------------------------------

@lru_cache(maxsize=256)
def _table(module: ZGModule, coeff: str, p_max: int):
    return cohomology(module, p_max, coeff)


def _family_label(fam: Family, p: int, q: int, coeff: str, row_zero: bool) -> str:
    if coeff == "F2":
        mono = monomial(F2_RING, p)
        if row_zero:
            return mono
        return fam.name if mono == "1" else f"{mono}*{fam.name}"
    k = p // 2
    if row_zero:
        return monomial(Z4_RING, 2 * k)
    if k == 0:
        return fam.name
    pre = fam.prefix if k == 1 else f"{fam.prefix}^{k}"
    return f"{pre}*{fam.name}"


@dataclass
class Entry:
    """E2 data at one position: generator orders, labels and family ownership."""

    p: int
    q: int
    orders: list[int]
    labels: list[str]
    families: list[str]
    blocks: dict[str, tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.orders)

    def relations(self) -> np.ndarray:
        k = self.size
        cols = []
        for i, o in enumerate(self.orders):
            if o:
                e = np.zeros(k, dtype=object)
                e[i] = o
                cols.append(e)
        return np.array(cols, dtype=object).T if cols else np.zeros((k, 0), dtype=object)

    def family_index(self, token: str) -> int:
        """E2 coordinate of ``family`` or ``family[j]``."""
        m = re.fullmatch(r"(\w+)(?:\[(\d+)\])?", token)
        if not m or m.group(1) not in self.blocks:
            raise KeyError(token)
        lo, hi = self.blocks[m.group(1)]
        j = int(m.group(2) or 0)
        if lo + j >= hi or (m.group(2) is None and hi - lo > 1):
            raise KeyError(token)
        return lo + j


def _block_diag(mats, rows, cols) -> np.ndarray:
    out = np.zeros((sum(rows), sum(cols)), dtype=object)
    r = c = 0
    for m, nr, nc in zip(mats, rows, cols):
        if nr and nc:
            out[r:r + nr, c:c + nc] = m
        r += nr
        c += nc
    return out


class SSPage:
    """One page of the spectral sequence, with the E2 data it is measured against."""

    def __init__(self, fiber: Fiber, p_max: int, r: int = 2):
        self.fiber = fiber
        self.coeff = fiber.coeff
        self.p_max = p_max
        self.r = r
        self.entries: dict[tuple[int, int], Entry] = {}
        self.kernels: dict[tuple[int, int], np.ndarray] = {}
        self.images: dict[tuple[int, int], np.ndarray] = {}
        self.history: list[dict] = []

    # construction ----------------------------------------------------------
    @classmethod
    def e2(cls, fiber: Fiber, p_max: int) -> "SSPage":
        page = cls(fiber, p_max, 2)
        for q, fams in fiber.rows.items():
            for p in range(p_max + 1):
                orders, labels, owners, blocks = [], [], [], {}
                for fam in fams:
                    sq = _table(fam.module, fiber.coeff, p_max + 2).subquotient(p)
                    base = _family_label(fam, p, q, fiber.coeff, q == 0)
                    lo = len(orders)
                    for j, o in enumerate(sq.orders):
                        orders.append(o)
                        labels.append(base if len(sq) == 1 else f"{base}[{j}]")
                        owners.append(fam.name)
                    blocks[fam.name] = (lo, len(orders))
                if orders:
                    e = Entry(p, q, orders, labels, owners, blocks)
                    page.entries[(p, q)] = e
                    page.kernels[(p, q)] = np.eye(e.size, dtype=int).astype(object)
                    page.images[(p, q)] = e.relations()
        return page

    def copy(self) -> "SSPage":
        out = SSPage(self.fiber, self.p_max, self.r)
        out.entries = self.entries
        out.kernels = dict(self.kernels)
        out.images = dict(self.images)
        out.history = list(self.history)
        return out

    # queries -----------------------------------------------------------------
    def subquotient(self, pos) -> Subquotient | None:
        if pos not in self.entries:
            return None
        return _subquotient(self.kernels[pos], self.images[pos], self.entries[pos].size)

    def group(self, pos) -> FinAbGroup:
        sq = self.subquotient(pos)
        return FinAbGroup(0, ()) if sq is None else sq.group

    def is_zero(self, pos) -> bool:
        return self.group(pos).is_zero

    def positions(self) -> list[tuple[int, int]]:
        return sorted(self.entries, key=lambda t: (t[1], t[0]))

    def nonzero(self) -> list[tuple[int, int]]:
        return [pos for pos in self.positions() if not self.is_zero(pos)]

    def labels(self, pos) -> list[str]:
        """Labels of the current generators, written in E2 generators."""
        sq = self.subquotient(pos)
        if sq is None:
            return []
        e = self.entries[pos]
        return [_combo_label(g, e) for g in sq.generators]

    def rows(self) -> list[dict]:
        out = []
        for pos in self.positions():
            g = self.group(pos)
            if g.is_zero:
                continue
            out.append({"p": pos[0], "q": pos[1], "group": str(g), "generators": self.labels(pos)})
        return out

    # U action ------------------------------------------------------------------
    def u_matrix(self, pos) -> np.ndarray | None:
        """Multiplication by U (u^... in F2: u) from (p, q) to (p+2, q) in E2 coordinates."""
        p, q = pos
        src, tgt = self.entries.get(pos), self.entries.get((p + 2, q))
        if src is None or tgt is None:
            return None
        mats, rows, cols = [], [], []
        for fam in self.fiber.rows[q]:
            t = _table(fam.module, self.coeff, self.p_max + 2)
            rows.append(len(t.subquotient(p + 2)))
            cols.append(len(t.subquotient(p)))
            mats.append(u_action(fam.module, p, self.coeff, t))
        return _block_diag(mats, rows, cols)


def _subquotient(kernel, image, k) -> Subquotient:
    return Subquotient(kernel, image, k)


def _combo_label(vec, entry: Entry) -> str:
    parts = []
    for c, lab in zip(vec, entry.labels):
        c = int(c)
        if c == 0:
            continue
        parts.append(lab if c == 1 else f"{c}*{lab}")
    return " + ".join(parts) or "0"


def build_e2(fiber: Fiber | dict, g: CyclicGroupSpec = Z4, coeff: str | None = None,
             p_max: int = DEFAULT_P_MAX) -> SSPage:
    """E2^{p,q} = H^p(Z_n; H^q(fiber)) for 0 <= p <= p_max."""
    if isinstance(fiber, dict):
        fiber = fiber_from_modules(fiber, coeff or "Z")
    elif coeff is not None and coeff != fiber.coeff:
        raise ValueError(f"fiber has coefficients {fiber.coeff}, not {coeff}")
    for fams in fiber.rows.values():
        for fam in fams:
            if fam.module.n != g.n:
                raise ValueError(f"family {fam.name} is a Z{fam.module.n}-module, expected Z{g.n}")
    return SSPage.e2(fiber, p_max)


def e2_for_case(case: str, p_max: int = DEFAULT_P_MAX) -> SSPage:
    return build_e2(case_fiber(case), Z4, p_max=p_max)


# -- ledger -------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    """d_page(gen at from + i*(step, 0)) = image at to + i*(step, 0) for i >= start."""

    page: int
    source: tuple[int, int]
    gen: str
    target: tuple[int, int]
    image: str
    start: int = 0
    step: int = 2
    line: int | None = None

    def instances(self, p_limit: int):
        i = self.start
        while self.source[0] + self.step * i <= p_limit:
            src = (self.source[0] + self.step * i, self.source[1])
            tgt = (self.target[0] + self.step * i, self.target[1])
            yield i, src, tgt
            i += 1

    def to_line(self) -> str:
        s = (f"page={self.page} from=({self.source[0]},{self.source[1]}) gen={self.gen} "
             f"to=({self.target[0]},{self.target[1]}) image={self.image} range=i>={self.start}")
        return s if self.step == 2 else f"{s} step={self.step}"


@dataclass
class DifferentialLedger:
    rules: list[Rule] = field(default_factory=list)
    name: str = ""

    def pages(self) -> list[int]:
        return sorted({r.page for r in self.rules})

    def to_text(self) -> str:
        return "\n".join(r.to_line() for r in self.rules) + ("\n" if self.rules else "")


_FIELD = re.compile(r"(\w+)=(\([^)]*\)|\S+)")
_PAIR = re.compile(r"\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)")
_RANGE = re.compile(r"i>=(\d+)")


def _check_bidegree(rule: Rule) -> None:
    dp = rule.target[0] - rule.source[0]
    dq = rule.target[1] - rule.source[1]
    if rule.page < 2:
        raise MalformedRule(f"page {rule.page} < 2", rule.line)
    if (dp, dq) != (rule.page, 1 - rule.page):
        raise MalformedRule(
            f"bidegree ({dp},{dq}) does not match page {rule.page} (expected ({rule.page},{1 - rule.page}))",
            rule.line)
    if rule.step < 1:
        raise MalformedRule("step must be positive", rule.line)


def parse_ledger(text: str, name: str = "") -> DifferentialLedger:
    """Parse the line-oriented ledger format; '#' starts a comment."""
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = dict(_FIELD.findall(line))
        unknown = set(fields) - {"page", "from", "gen", "to", "image", "range", "step"}
        if unknown:
            raise MalformedRule(f"unknown fields {sorted(unknown)}", lineno)
        missing = {"page", "from", "gen", "to", "image"} - set(fields)
        if missing:
            raise MalformedRule(f"missing fields {sorted(missing)}", lineno)
        try:
            page = int(fields["page"])
            src = _PAIR.fullmatch(fields["from"])
            tgt = _PAIR.fullmatch(fields["to"])
            if not src or not tgt:
                raise ValueError("positions must look like (p,q)")
            rng = _RANGE.fullmatch(fields.get("range", "i>=0"))
            if not rng:
                raise ValueError("range must look like i>=k")
            step = int(fields.get("step", 2))
        except ValueError as exc:
            raise MalformedRule(str(exc), lineno) from None
        rule = Rule(page, (int(src.group(1)), int(src.group(2))), fields["gen"],
                    (int(tgt.group(1)), int(tgt.group(2))), fields["image"],
                    int(rng.group(1)), step, lineno)
        _check_bidegree(rule)
        rules.append(rule)
    return DifferentialLedger(rules, name)


def load_ledger(path) -> DifferentialLedger:
    with open(path, encoding="utf-8") as fh:
        return parse_ledger(fh.read(), str(path))


SPHERE_Z_LEDGER = """\
# d3 from row 6 onto the coset summand of row 4
page=3 from=(1,6) gen=Upsilon to=(4,4) image=T*s range=i>=1
# d5 from Lambda onto row 0
page=5 from=(1,4) gen=Lambda to=(6,0) image=U^3 range=i>=0
"""

SPHERE_F2_LEDGER = """\
page=3 from=(0,6) gen=Upsilon to=(3,4) image=s step=1 range=i>=2
page=5 from=(0,4) gen=Lambda to=(5,0) image=u step=1 range=i>=0
"""

CIRCLE_Z_LEDGER = """\
page=2 from=(1,3) gen=Upsilon to=(3,2) image=Theta range=i>=0
page=3 from=(1,2) gen=Lambda to=(4,0) image=U^2 range=i>=0
"""

DEFAULT_LEDGERS = {"sphere-z": SPHERE_Z_LEDGER, "sphere-f2": SPHERE_F2_LEDGER, "circle-z": CIRCLE_Z_LEDGER}


def default_ledger(case: str) -> DifferentialLedger:
    return parse_ledger(DEFAULT_LEDGERS[case], case)


def _family_token(label: str) -> tuple[int, str]:
    """Split "2*T*s" into (2, "s"); "U^3" into (1, "U")."""
    m = re.fullmatch(r"\s*(-?\d+)\s*\*?\s*(.*)", label)
    coeff, rest = (int(m.group(1)), m.group(2)) if m else (1, label.strip())
    if not rest:
        return coeff, "1"
    token = rest.split("*")[-1]
    token = re.sub(r"\^\d+", "", token)
    return coeff, token


def _resolve(entry: Entry, label: str, fiber: Fiber, line) -> tuple[int, int]:
    coeff, token = _family_token(label)
    if entry.q == 0 and token in ("1", "e", "U", "u"):
        token = fiber.row_zero
    try:
        return coeff, entry.family_index(token)
    except KeyError:
        raise MalformedRule(f"no generator {label!r} at ({entry.p},{entry.q})", line) from None


# -- page transitions ----------------------------------------------------------

@dataclass
class Differential:
    """d_r from ``source`` to ``target`` as a matrix on E_r generator coordinates."""

    source: tuple[int, int]
    target: tuple[int, int]
    matrix: np.ndarray
    note: str = ""


def _cols(m) -> list:
    return [m[:, j] for j in range(m.shape[1])]


def rule_differentials(page: SSPage, rules: list[Rule]) -> list[Differential]:
    """Turn page-r ledger rules into validated differentials on E_r."""
    per_pair: dict[tuple, np.ndarray] = {}
    notes: dict[tuple, list[str]] = {}
    for rule in rules:
        for i, src, tgt in rule.instances(page.p_max):
            if src not in page.entries:
                raise MalformedRule(f"source ({src[0]},{src[1]}) is empty on E2", rule.line)
            if tgt[0] > page.p_max:
                continue
            if tgt not in page.entries:
                raise MalformedRule(f"target ({tgt[0]},{tgt[1]}) is empty on E2", rule.line)
            se, te = page.entries[src], page.entries[tgt]
            _, j = _resolve(se, rule.gen, page.fiber, rule.line)
            c, k = _resolve(te, rule.image, page.fiber, rule.line)
            d = per_pair.setdefault((src, tgt), np.zeros((te.size, se.size), dtype=object))
            d[k, j] += c
            notes.setdefault((src, tgt), []).append(f"{rule.gen}->{rule.image} (i={i})")
    out = []
    for (src, tgt), d_e2 in sorted(per_pair.items()):
        line = next((r.line for r in rules), None)
        sq_s, sq_t = page.subquotient(src), page.subquotient(tgt)
        for v in _cols(page.images[src]):
            if not sq_t.sub.contains(matmul(d_e2, int_matrix(v))[:, 0]) or \
                    not sq_t.is_zero_class(matmul(d_e2, int_matrix(v))[:, 0]):
                raise MalformedRule(f"d_{page.r} {src}->{tgt} is not well defined on E_{page.r}", line)
        mat = np.zeros((len(sq_t), len(sq_s)), dtype=object)
        for j, g in enumerate(sq_s.generators):
            img = matmul(d_e2, int_matrix(g))[:, 0]
            if not sq_t.sub.contains(img):
                raise MalformedRule(f"d_{page.r} {src}->{tgt} leaves the cycles of E_{page.r}", line)
            mat[:, j] = sq_t.coords(img)
        _check_hom(mat, sq_s.orders, sq_t.orders, line)
        out.append(Differential(src, tgt, mat, "; ".join(notes[(src, tgt)])))
    return out


def _check_hom(mat, src_orders, tgt_orders, line=None) -> None:
    for j, o in enumerate(src_orders):
        for i, t in enumerate(tgt_orders):
            c = int(mat[i, j])
            if o == 0:
                continue
            if t == 0 and c != 0:
                raise MalformedRule("torsion generator mapped to a free generator", line)
            if t and (o * c) % t:
                raise MalformedRule("rule does not respect generator orders", line)


def _check_composable(page: SSPage, diffs: list[Differential]) -> None:
    by_src = {d.source: d for d in diffs}
    for d in diffs:
        nxt = by_src.get(d.target)
        if nxt is None:
            continue
        comp = matmul(nxt.matrix, d.matrix)
        orders = page.subquotient(nxt.target).orders
        for i, o in enumerate(orders):
            for j in range(comp.shape[1]):
                v = int(comp[i, j])
                if (o and v % o) or (not o and v):
                    raise MalformedRule(f"d o d != 0 through {d.target}")


def advance(page: SSPage, diffs: list[Differential]) -> SSPage:
    """E_{r+1} = ker(d_r) / im(d_r) entrywise."""
    _check_composable(page, diffs)
    nxt = page.copy()
    nxt.r = page.r + 1
    seen_src, seen_tgt = set(), set()
    for d in diffs:
        if d.source in seen_src or d.target in seen_tgt:
            raise MalformedRule(f"two differentials share {d.source} or {d.target}")
        seen_src.add(d.source)
        seen_tgt.add(d.target)
    for d in diffs:
        sq_s, sq_t = page.subquotient(d.source), page.subquotient(d.target)
        ker = hom_kernel(d.matrix, sq_s.orders, sq_t.orders)
        gens = [sq_s.lift(ker.basis[:, j]) for j in range(ker.rank)]
        k = page.entries[d.source].size
        gens += _cols(page.images[d.source])
        nxt.kernels[d.source] = _stack(gens, k)
        imgs = [sq_t.lift(d.matrix[:, j]) for j in range(d.matrix.shape[1])]
        imgs += _cols(page.images[d.target])
        nxt.images[d.target] = _stack(imgs, page.entries[d.target].size)
    nxt.history.append({"page": page.r, "differentials": [
        {"from": list(d.source), "to": list(d.target), "matrix": [[int(x) for x in row] for row in d.matrix],
         "note": d.note} for d in diffs]})
    return nxt


def _stack(vectors, k) -> np.ndarray:
    if not vectors:
        return np.zeros((k, 0), dtype=object)
    lat = Lattice(np.array([np.asarray(v, dtype=object) for v in vectors], dtype=object).T, k)
    return lat.basis


def transition_check(before: SSPage, after: SSPage, diffs: list[Differential]) -> bool:
    """Recompute ker(out)/im(in) in E_r coordinates and compare with ``after``."""
    out_by = {d.source: d for d in diffs}
    in_by = {d.target: d for d in diffs}
    for pos in before.entries:
        sq = before.subquotient(pos)
        m = len(sq)
        if pos in out_by:
            d = out_by[pos]
            ker = hom_kernel(d.matrix, sq.orders, before.subquotient(d.target).orders).basis
        else:
            ker = np.eye(m, dtype=int).astype(object)
        rel = [np.eye(m, dtype=int)[:, j].astype(object) * o for j, o in enumerate(sq.orders) if o]
        if pos in in_by:
            rel += _cols(in_by[pos].matrix)
        img = _stack(rel, m)
        if Subquotient(ker, img, m).group != after.group(pos):
            return False
    return True


def run_pages(e2: SSPage, ledger: DifferentialLedger, last_page: int | None = None) -> list[SSPage]:
    """All pages E_2, E_3, ... up to E_{last_page + 1}."""
    last = max(ledger.pages(), default=2) if last_page is None else last_page
    for rule in ledger.rules:
        _check_bidegree(rule)
    pages = [e2]
    page = e2
    while page.r <= last:
        rules = [r for r in ledger.rules if r.page == page.r]
        diffs = rule_differentials(page, rules)
        page = advance(page, diffs)
        pages.append(page)
    return pages


def convergence_offenders(page: SSPage, total_bound: int, check_p: int) -> list[tuple[int, int]]:
    bad = [pos for pos in page.entries
           if pos[0] + pos[1] > total_bound and pos[0] <= check_p and not page.is_zero(pos)]
    return sorted(bad, key=lambda t: (t[0] + t[1], -t[1]))


def run_ledger(e2: SSPage, ledger: DifferentialLedger, total_bound: int | None = None,
               check_p: int = DEFAULT_CHECK_P) -> SSPage:
    """Apply the ledger page by page and certify vanishing above ``total_bound``.

    Only columns p <= check_p are checked; columns near p_max may still be hit
    by differentials from outside the table.
    """
    total_bound = e2.fiber.total_bound if total_bound is None else total_bound
    max_page = max(ledger.pages(), default=2)
    if check_p + max_page > e2.p_max:
        raise ValueError(f"p_max={e2.p_max} is too small to check columns up to {check_p}")
    final = run_pages(e2, ledger, max(max_page, 2))[-1]
    bad = convergence_offenders(final, total_bound, check_p)
    if bad:
        raise ConvergenceViolation(bad)
    return final


def edge_index(einf: SSPage, coeff: str | None = None, bound: int | None = None) -> GradedIdeal:
    """Kernel of H^*(BG) = E2^{*,0} -> E_inf^{*,0} as a graded ideal."""
    coeff = coeff or einf.coeff
    ring = Z4_RING if coeff == "Z" else F2_RING
    bound = einf.p_max if bound is None else bound
    table = {}
    for p in range(bound + 1):
        pos = (p, 0)
        m = coefficient_modulus(ring, p)
        if pos not in einf.entries:
            table[p] = m if m is not None else 0
            continue
        g = 0
        for v in _cols(einf.images[pos]):
            g = gcd(g, int(v[0]))
        table[p] = g if m is None else gcd(g, m)
    return GradedIdeal.from_table(ring, table, bound)


def case_index(case: str, ledger: DifferentialLedger | None = None) -> tuple[GradedIdeal, SSPage]:
    e2 = e2_for_case(case)
    final = run_ledger(e2, ledger or default_ledger(case))
    return edge_index(final), final


# -- forced pattern search -------------------------------------------------------

@dataclass
class SearchReport:
    admissible: list[list[dict]]
    kernels: dict[str, dict[int, int]]
    nodes: int
    window: int

    @property
    def unique(self) -> bool:
        return len(self.kernels) == 1

    @property
    def kernel(self) -> str | None:
        return next(iter(self.kernels)) if self.unique else None

    def to_dict(self) -> dict:
        return {"window": self.window, "nodes": self.nodes, "admissible": len(self.admissible),
                "kernels": sorted(self.kernels), "unique": self.unique}


def _homs(src_orders, tgt_orders, free_bound):
    """All homomorphisms between presented groups, as E_r coordinate matrices."""
    choices = []
    for j, o in enumerate(src_orders):
        for i, t in enumerate(tgt_orders):
            if t == 0:
                vals = [0] if o else list(range(-free_bound, free_bound + 1))
            else:
                vals = [c for c in range(t) if o == 0 or (o * c) % t == 0]
            choices.append(vals)
    n, m = len(tgt_orders), len(src_orders)
    for combo in product(*choices):
        mat = np.zeros((n, m), dtype=object)
        it = iter(combo)
        for j in range(m):
            for i in range(n):
                mat[i, j] = next(it)
        yield mat


def _u_consistent(page: SSPage, prev: Differential, cand: Differential) -> bool:
    """d(U x) = U d(x) for x in E_r at prev.source."""
    u_src = page.u_matrix(prev.source)
    u_tgt = page.u_matrix(prev.target)
    if u_src is None or u_tgt is None:
        return True
    sq_a, sq_b = page.subquotient(prev.source), page.subquotient(prev.target)
    sq_c, sq_d = page.subquotient(cand.source), page.subquotient(cand.target)
    for j, g in enumerate(sq_a.generators):
        ug = matmul(u_src, int_matrix(g))[:, 0]
        if not sq_c.sub.contains(ug):
            return True
        lhs = matmul(cand.matrix, int_matrix(sq_c.coords(ug)))[:, 0]
        dg = sq_b.lift(prev.matrix[:, j])
        udg = matmul(u_tgt, int_matrix(dg))[:, 0]
        if not sq_d.sub.contains(udg):
            return False
        diff = sq_d.lift(lhs) - udg
        if not sq_d.sub.contains(diff) or not sq_d.is_zero_class(diff):
            return False
    return True


def _killable(page: SSPage, pos, max_row: int) -> bool:
    p, q = pos
    for r in range(page.r, max_row + 2):
        for other in ((p + r, q - r + 1), (p - r, q + r - 1)):
            if other in page.entries and not page.is_zero(other):
                return True
    return False


def forced_pattern_search(e2: SSPage, total_bound: int | None = None, p_window: int = 10,
                          u_linear: bool = True, budget: int = 200_000,
                          free_bound: int = 2) -> SearchReport:
    """Enumerate all differential patterns compatible with vanishing above ``total_bound``.

    Differentials are chosen page by page for sources with p <= p_window.
    With ``u_linear`` each choice must commute with multiplication by U.
    Maps into free groups use coefficients in [-free_bound, free_bound].
    """
    if p_window > 12:
        raise ValueError("p_window must be <= 12")
    total_bound = e2.fiber.total_bound if total_bound is None else total_bound
    max_row = max(e2.fiber.rows)
    last_page = max_row + 1
    if p_window + last_page > e2.p_max:
        e2 = SSPage.e2(e2.fiber, p_window + last_page)
    report = SearchReport([], {}, 0, p_window)

    def candidates(page):
        out = []
        for (p, q) in sorted(page.entries):
            tgt = (p + page.r, q - page.r + 1)
            if p <= p_window and tgt in page.entries and not page.is_zero((p, q)) and not page.is_zero(tgt):
                out.append(((p, q), tgt))
        return sorted(out, key=lambda st: (st[0][1], st[0][0]))

    def page_dfs(page, cands, idx, chosen, trail):
        report.nodes += 1
        if report.nodes > budget:
            raise SearchBudgetExceeded(f"more than {budget} search nodes")
        if idx == len(cands):
            nonzero = [d for d in chosen if any(int(x) for x in d.matrix.flat)]
            try:
                nxt = advance(page, nonzero)
            except MalformedRule:
                return
            entry = trail + [{"page": page.r, "from": list(d.source), "to": list(d.target),
                              "matrix": [[int(x) for x in row] for row in d.matrix]} for d in nonzero]
            next_page(nxt, entry)
            return
        src, tgt = cands[idx]
        sq_s, sq_t = page.subquotient(src), page.subquotient(tgt)
        prev = next((d for d in chosen if d.source == (src[0] - 2, src[1])), None)
        incoming = next((d for d in chosen if d.target == src), None)
        for mat in _homs(sq_s.orders, sq_t.orders, free_bound):
            cand = Differential(src, tgt, mat)
            if u_linear and prev is not None and not _u_consistent(page, prev, cand):
                continue
            if incoming is not None:
                comp = matmul(mat, incoming.matrix)
                if any((o and int(comp[i, j]) % o) or (not o and int(comp[i, j]))
                       for i, o in enumerate(sq_t.orders) for j in range(comp.shape[1])):
                    continue
            page_dfs(page, cands, idx + 1, chosen + [cand], trail)

    def next_page(page, trail):
        if page.r > last_page:
            if convergence_offenders(page, total_bound, p_window):
                return
            try:
                ideal = edge_index(page, bound=p_window)
            except ValueError:
                return  # row-0 kernel is not an ideal, so the pattern is not multiplicative
            key = str(ideal)
            report.kernels.setdefault(key, dict(ideal.table))
            report.admissible.append(trail)
            return
        for pos in convergence_offenders(page, total_bound, p_window):
            if not _killable(page, pos, max_row):
                return
        page_dfs(page, candidates(page), 0, [], trail)

    next_page(e2, [])
    return report


# -- emission --------------------------------------------------------------------

def page_to_json(page: SSPage) -> dict:
    return {"page": page.r, "coeff": page.coeff, "p_max": page.p_max, "entries": page.rows(),
            "history": page.history}


def page_to_ascii(page: SSPage, p_limit: int | None = None) -> str:
    p_limit = page.p_max if p_limit is None else p_limit
    rows = sorted({q for _, q in page.entries}, reverse=True)
    width = 7
    lines = [f"E_{page.r} ({page.coeff})"]
    for q in rows:
        cells = []
        for p in range(p_limit + 1):
            g = page.group((p, q))
            cells.append(("." if g.is_zero else str(g).replace(" ", "")).rjust(width))
        lines.append(f"q={q:<2}|" + "".join(cells))
    lines.append("    +" + "".join(f"p={p}".rjust(width) for p in range(p_limit + 1)))
    return "\n".join(lines)


def pages_to_json(pages: list[SSPage]) -> str:
    return json.dumps([page_to_json(p) for p in pages], indent=2)
