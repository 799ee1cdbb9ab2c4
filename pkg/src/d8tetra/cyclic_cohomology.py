"""Cohomology of cyclic groups via the 2-periodic free resolution.

For a Z_n-module with generator action A, the cochain complex is M in every
degree with differentials alternating (A - 1) and the norm
1 + A + ... + A^(n-1):

    H^0 = ker(A - 1)
    H^odd = ker(norm) / im(A - 1)
    H^even>0 = ker(A - 1) / im(norm)

Multiplication by the degree-2 generator U of H^*(Z_n; Z) is the identity on
cochains, shifted by two degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exact_linalg import (
    FinAbGroup, Lattice, homology_at, homology_at_mod2, identity, int_matrix, int_solve,
    is_exact_at, is_zero, kernel_basis, matmul, smith_normal_form,
)
from .zg_modules import (
    CyclicGroupSpec, ZGModule, coset_module, is_equivariant, mod2_reduce, named_module,
)

DEFAULT_PMAX = 12


class NotExact(ArithmeticError):
    def __init__(self, position: str):
        super().__init__(f"long exact sequence fails to be exact at {position}")
        self.position = position


@dataclass
class CochainComplex:
    module: ZGModule
    p_max: int

    def differential(self, p: int) -> np.ndarray:
        """d^p : C^p -> C^(p+1); d^-1 is the zero map from the zero group."""
        m = self.module
        if p < 0:
            return np.zeros((m.rank, 0), dtype=object)
        if p % 2 == 0:
            return m.action - identity(m.rank)
        return m.norm_matrix()

    @property
    def differentials(self) -> list[np.ndarray]:
        return [self.differential(p) for p in range(self.p_max + 1)]


def _coerce(m: ZGModule, coeff: str) -> ZGModule:
    if coeff not in ("Z", "F2"):
        raise ValueError(f"coefficients must be 'Z' or 'F2', got {coeff!r}")
    if coeff == "F2" and m.coeff == "Z":
        return mod2_reduce(m)
    if coeff == "Z" and m.coeff == "F2":
        raise ValueError("cannot lift an F2 module to Z coefficients")
    return m


@dataclass
class CohomologyTable:
    module: ZGModule
    coeff: str
    p_max: int
    groups: list = field(default_factory=list)

    def __getitem__(self, p: int) -> FinAbGroup:
        return self.groups[p].group

    def subquotient(self, p: int):
        """The degree-p group with cocycle representatives and a coordinate map."""
        return self.groups[p]

    def as_list(self) -> list[FinAbGroup]:
        return [g.group for g in self.groups]

    def rows(self) -> list[dict]:
        out = []
        for p, g in enumerate(self.groups):
            out.append({
                "degree": p,
                "group": str(g.group),
                "cocycles": [[int(v) for v in gen] for gen in g.generators],
            })
        return out


def cohomology(m: ZGModule, p_max: int = DEFAULT_PMAX, coeff: str = "Z") -> CohomologyTable:
    """H^p(Z_n; m) for 0 <= p <= p_max, over Z or F2."""
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    m = _coerce(m, coeff)
    cx = CochainComplex(m, p_max + 2)
    table = CohomologyTable(m, coeff, p_max)
    for p in range(p_max + 1):
        d_in, d_out = cx.differential(p - 1), cx.differential(p)
        if coeff == "Z":
            table.groups.append(homology_at(d_in, d_out))
        else:
            table.groups.append(homology_at_mod2(d_in, d_out))
    return table


def u_action(m: ZGModule, p: int, coeff: str = "Z", table: CohomologyTable | None = None) -> np.ndarray:
    """Matrix of multiplication by U : H^p -> H^(p+2) in generator coordinates.

    Degree-p cocycles are cocycles in degree p+2 as well (for p = 0 this is
    the projection of invariants into ker(A-1)/im(norm)).
    """
    if p < 0:
        raise ValueError("degree must be >= 0")
    if table is None or table.p_max < p + 2:
        table = cohomology(m, p + 2, coeff)
    src, tgt = table.subquotient(p), table.subquotient(p + 2)
    out = np.zeros((len(tgt), len(src)), dtype=object)
    for j, g in enumerate(src.generators):
        out[:, j] = tgt.coords(g)
    return out


def induced_map(f, src: ZGModule, tgt: ZGModule, p: int, coeff: str = "Z",
                src_table: CohomologyTable | None = None,
                tgt_table: CohomologyTable | None = None) -> np.ndarray:
    """Map on H^p induced by an equivariant module map ``f``."""
    f = int_matrix(f, tgt.rank, src.rank)
    if not is_equivariant(f, src, tgt):
        raise ValueError("map is not equivariant")
    src_table = src_table or cohomology(src, p, coeff)
    tgt_table = tgt_table or cohomology(tgt, p, coeff)
    s, t = src_table.subquotient(p), tgt_table.subquotient(p)
    out = np.zeros((len(t), len(s)), dtype=object)
    for j, g in enumerate(s.generators):
        out[:, j] = t.coords(matmul(f, int_matrix(g))[:, 0])
    return out


@dataclass
class ShortExactSequence:
    """0 -> A --inc--> B --proj--> C -> 0 of Z_n-modules."""

    a: ZGModule
    b: ZGModule
    c: ZGModule
    inc: np.ndarray
    proj: np.ndarray

    def __post_init__(self):
        self.inc = int_matrix(self.inc, self.b.rank, self.a.rank)
        self.proj = int_matrix(self.proj, self.c.rank, self.b.rank)

    def check(self) -> None:
        if not (self.a.n == self.b.n == self.c.n):
            raise ValueError("modules over different groups")
        if not is_equivariant(self.inc, self.a, self.b):
            raise ValueError("inclusion is not equivariant")
        if not is_equivariant(self.proj, self.b, self.c):
            raise ValueError("projection is not equivariant")
        if not is_zero(matmul(self.proj, self.inc)):
            raise ValueError("proj . inc != 0")
        if smith_normal_form(self.inc).rank != self.a.rank:
            raise ValueError("inclusion is not injective")
        snf = smith_normal_form(self.proj)
        if snf.rank != self.c.rank or any(d != 1 for d in snf.invariants[:snf.rank]):
            raise ValueError("projection is not surjective")
        if Lattice(self.inc, self.b.rank) != Lattice(kernel_basis(self.proj), self.b.rank):
            raise ValueError("image of inclusion differs from kernel of projection")


def connecting_map(ses: ShortExactSequence, p: int, tables=None) -> np.ndarray:
    """delta : H^p(C) -> H^(p+1)(A) via the snake construction on cochains."""
    ta, tb, tc = tables or [cohomology(x, p + 1) for x in (ses.a, ses.b, ses.c)]
    dB = CochainComplex(ses.b, p + 1).differential(p)
    src, tgt = tc.subquotient(p), ta.subquotient(p + 1)
    out = np.zeros((len(tgt), len(src)), dtype=object)
    for j, g in enumerate(src.generators):
        b = int_solve(ses.proj, g)
        db = matmul(dB, int_matrix(b))[:, 0]
        a = int_solve(ses.inc, db)
        if a is None:
            raise ArithmeticError("coboundary of the lift does not come from A")
        out[:, j] = tgt.coords(a)
    return out


@dataclass
class LESReport:
    positions: list[str]
    exact: list[bool]
    groups: list[str]

    @property
    def ok(self) -> bool:
        return all(self.exact)


def les_verify(ses: ShortExactSequence, p_max: int = 8, strict: bool = True) -> LESReport:
    """Check exactness of the cohomology long exact sequence through degree p_max."""
    ses.check()
    tabs = [cohomology(x, p_max + 1) for x in (ses.a, ses.b, ses.c)]
    ta, tb, tc = tabs
    # sequence terms: H^p(A), H^p(B), H^p(C), H^(p+1)(A), ...
    terms, maps = [], []
    for p in range(p_max + 1):
        terms += [(f"H^{p}(A)", ta.subquotient(p)), (f"H^{p}(B)", tb.subquotient(p)),
                  (f"H^{p}(C)", tc.subquotient(p))]
        maps += [
            induced_map(ses.inc, ses.a, ses.b, p, src_table=ta, tgt_table=tb),
            induced_map(ses.proj, ses.b, ses.c, p, src_table=tb, tgt_table=tc),
            connecting_map(ses, p, tabs),
        ]
    positions, exact = [], []
    # injectivity of H^0(A) -> H^0(B)
    zero = np.zeros((len(terms[0][1]), 0), dtype=object)
    positions.append(terms[0][0])
    exact.append(is_exact_at(zero, maps[0], [], terms[0][1].orders, terms[1][1].orders))
    for k in range(1, len(terms) - 1):
        prev, cur, nxt = terms[k - 1][1], terms[k][1], terms[k + 1][1]
        positions.append(terms[k][0])
        exact.append(is_exact_at(maps[k - 1], maps[k], prev.orders, cur.orders, nxt.orders))
    report = LESReport(positions, exact, [str(t[1].group) for t in terms])
    if strict:
        for pos, ok in zip(positions, exact):
            if not ok:
                raise NotExact(pos)
    return report


def norm_sequence() -> ShortExactSequence:
    """0 -> Z --norm--> Z[Z4] -> M -> 0."""
    z, reg, m = named_module("trivial"), named_module("regular"), named_module("M")
    inc = [[1], [1], [1], [1]]
    proj = [[1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]]
    return ShortExactSequence(z, reg, m, inc, proj)


def alpha_sequence() -> ShortExactSequence:
    """0 -> N --alpha--> Z[Z4] -> L -> 0.

    With w.x_i = x_(i+1) on Z[Z4] and w.(a, b) = (b, -a) on N, the equivariant
    embedding is alpha(p, q) = (p, -q, -p, q).
    """
    n, reg, l = named_module("N"), named_module("regular"), named_module("L")
    inc = [[1, 0], [0, -1], [-1, 0], [0, 1]]
    proj = [[1, 0, 1, 0], [0, 1, 0, 1]]
    return ShortExactSequence(n, reg, l, inc, proj)


def bockstein_verify(n: int = 2, p_max: int = 8) -> LESReport:
    """LES of 0 -> Z -2-> Z -> F2 -> 0 with trivial Z_n action."""
    z = named_module("trivial", n)
    tz = cohomology(z, p_max + 1)
    tf = cohomology(z, p_max + 1, "F2")
    terms, maps = [], []
    for p in range(p_max + 1):
        a, b, c = tz.subquotient(p), tz.subquotient(p), tf.subquotient(p)
        nxt = tz.subquotient(p + 1)
        terms += [(f"H^{p}(Z)", a), (f"H^{p}(Z)'", b), (f"H^{p}(F2)", c)]
        times2 = _map_matrix(a, b, lambda v: 2 * v)
        red = _map_matrix(b, c, lambda v: v % 2)
        # delta: lift an F2 cocycle to Z, take the coboundary, divide by 2
        d = CochainComplex(z, p + 1).differential(p)
        delta = np.zeros((len(nxt), len(c)), dtype=object)
        for j, g in enumerate(c.generators):
            db = matmul(d, int_matrix(g))[:, 0]
            delta[:, j] = nxt.coords(np.array([v // 2 for v in db], dtype=object))
        maps += [times2, red, delta]
    positions, exact = [], []
    for k in range(1, len(terms) - 1):
        positions.append(terms[k][0])
        exact.append(is_exact_at(maps[k - 1], maps[k], terms[k - 1][1].orders,
                                 terms[k][1].orders, terms[k + 1][1].orders))
    return LESReport(positions, exact, [str(t[1].group) for t in terms])


def _map_matrix(src, tgt, fn) -> np.ndarray:
    out = np.zeros((len(tgt), len(src)), dtype=object)
    for j, g in enumerate(src.generators):
        out[:, j] = tgt.coords(fn(np.asarray(g, dtype=object)))
    return out


@dataclass
class ShapiroReport:
    n: int
    d: int
    induced: list[FinAbGroup]
    subgroup: list[FinAbGroup]

    @property
    def matches(self) -> bool:
        return self.induced == self.subgroup


def shapiro_check(g: CyclicGroupSpec | int, d: int, p_max: int = DEFAULT_PMAX) -> ShapiroReport:
    """Compare H^*(Z_n; Z[Z_n/Z_d]) with H^*(Z_d; Z)."""
    n = g.n if isinstance(g, CyclicGroupSpec) else int(g)
    induced = cohomology(coset_module(n, d), p_max).as_list()
    sub = cohomology(named_module("trivial", d), p_max).as_list()
    return ShapiroReport(n, d, induced, sub)
