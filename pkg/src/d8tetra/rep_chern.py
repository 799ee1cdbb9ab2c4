"""Real representations of Z_n, their splitting into complex lines, and Chern classes.

Multiplicities come from exact characters: traces of the integer action
matrices are paired against powers of a primitive n-th root of unity, with
arithmetic in Z[x]/Phi_n(x) so no floating point eigenvalues are involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact_linalg import int_matrix, int_solve, matmul, matpow
from .index_ring import Z4_RING, CohRingElement, GradedIdeal, mod2_reduce_ideal
from .zg_modules import OrderMismatch


class TrivialSummand(ValueError):
    pass


# -- cyclotomic integers ------------------------------------------------------

def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Division of integer polynomials (lowest degree first) by a monic ``den``."""
    num = list(num)
    dq = len(den) - 1
    if len(num) <= dq:
        return [0], num
    quot = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    return quot, num[:dq] or [0]


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic(d)))
            assert not any(rem)
    return tuple(poly)


def cyclo_reduce(vec: list[int], n: int) -> tuple[int, ...]:
    """Canonical form of sum vec[j] zeta_n^j."""
    _, rem = _poly_divmod(vec, list(cyclotomic(n)))
    deg = len(cyclotomic(n)) - 1
    rem = list(rem) + [0] * (deg - len(rem))
    return tuple(rem[:deg])


# -- representations ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RealRep:
    """Integer matrix of the generator of Z_n on a real representation."""

    n: int
    action: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "action", int_matrix(self.action, 0, 0))
        a = self.action
        if a.shape[0] and not _is_identity(matpow(a, self.n)):
            raise OrderMismatch(f"action of {self.label!r} does not have order dividing {self.n}")

    @property
    def dim(self) -> int:
        return self.action.shape[0]

    def trace_of_power(self, k: int) -> int:
        p = matpow(self.action, k % self.n)
        return sum(int(p[i, i]) for i in range(self.dim))


def _is_identity(m) -> bool:
    return all(m[i, j] == int(i == j) for i in range(m.shape[0]) for j in range(m.shape[1]))


def restrict_to_subspace(perm_action, basis, n: int, label: str = "") -> RealRep:
    """Action of ``perm_action`` on the invariant sublattice spanned by ``basis`` columns."""
    perm_action = int_matrix(perm_action)
    basis = int_matrix(basis)
    k = basis.shape[1]
    out = np.zeros((k, k), dtype=object)
    for j in range(k):
        img = matmul(perm_action, basis[:, j:j + 1])[:, 0]
        c = int_solve(basis, img)
        if c is None:
            raise ValueError("subspace is not invariant")
        out[:, j] = c
    return RealRep(n, out, label)


def u4_rep() -> RealRep:
    """Sum-zero vectors in R^4 with w.(x1, x2, x3, x4) = (x2, x3, x4, x1)."""
    shift = np.zeros((4, 4), dtype=object)
    for i in range(4):
        shift[i, (i + 1) % 4] = 1
    basis = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]]
    return restrict_to_subspace(shift, basis, 4, "U4")


def u2_rep() -> RealRep:
    """Sum-zero vectors in R^2 with w.(x1, x2) = (x2, x1)."""
    swap = [[0, 1], [1, 0]]
    return restrict_to_subspace(swap, [[1], [-1]], 4, "U2")


def trivial_rep(n: int = 4, dim: int = 1) -> RealRep:
    return RealRep(n, np.eye(dim, dtype=int), "R")


def real_direct_sum(*reps: RealRep) -> RealRep:
    n = reps[0].n
    if any(r.n != n for r in reps):
        raise OrderMismatch("representations of different groups")
    d = sum(r.dim for r in reps)
    out = np.zeros((d, d), dtype=object)
    k = 0
    for r in reps:
        out[k:k + r.dim, k:k + r.dim] = r.action
        k += r.dim
    return RealRep(n, out, " x ".join(r.label for r in reps))


@dataclass(frozen=True)
class RepSum:
    """Complex lines V^k (k mod n) plus leftover real lines.

    ``real_trivial`` counts trivial real lines; ``real_sign`` counts unpaired
    real lines on which the generator acts by -1 (two of them make V^(n/2)).
    """

    n: int
    lines: tuple[int, ...] = ()
    real_trivial: int = 0
    real_sign: int = 0

    @classmethod
    def of(cls, n: int, lines, real_trivial: int = 0, real_sign: int = 0) -> "RepSum":
        lines = [k % n for k in lines]
        if n % 2 == 0:
            pairs, real_sign = divmod(real_sign, 2)
            lines += [n // 2] * pairs
        return cls(n, tuple(sorted(lines)), real_trivial, real_sign)

    def __add__(self, other: "RepSum") -> "RepSum":
        if self.n != other.n:
            raise OrderMismatch("representations of different groups")
        return RepSum.of(self.n, self.lines + other.lines,
                         self.real_trivial + other.real_trivial, self.real_sign + other.real_sign)

    @property
    def complex_dim(self) -> int:
        return len(self.lines)

    @property
    def is_complex(self) -> bool:
        return self.real_trivial % 2 == 0 and self.real_sign == 0

    def character(self, g: int) -> tuple[int, ...]:
        """Character of the underlying real representation at w^g, in Z[zeta_n]."""
        vec = [0] * self.n
        for k in self.lines:
            vec[(k * g) % self.n] += 1
            vec[(-k * g) % self.n] += 1
        vec[0] += self.real_trivial
        vec[0] += self.real_sign * (-1) ** g
        return cyclo_reduce(vec, self.n)

    def __str__(self) -> str:
        parts = [f"V^{k}" for k in self.lines]
        parts += ["R"] * self.real_trivial + ["R^-"] * self.real_sign
        return " + ".join(parts) or "0"


def line_tensor(a: int, b: int, n: int = 4) -> int:
    """V^a (x) V^b = V^(a+b)."""
    return (a + b) % n


def decompose(r: RealRep, n: int | None = None) -> RepSum:
    """Split a real Z_n-representation into complex lines V^k with k in 1..n/2.

    A rotation block with eigenvalues e^(+-2 pi i k/n) becomes one line V^k with
    the smallest positive k; pairs of -1 eigenlines become V^(n/2).
    """
    n = r.n if n is None else n
    if n % r.n:
        raise OrderMismatch(f"representation of Z{r.n} is not a Z{n} representation")
    traces = [r.trace_of_power(g) for g in range(n)]
    mult = {}
    for k in range(n):
        vec = [0] * n
        for g, t in enumerate(traces):
            vec[(-k * g) % n] += t
        red = cyclo_reduce(vec, n)
        if any(red[1:]) or red[0] % n:
            raise ArithmeticError("non-integral multiplicity; character is inconsistent")
        mult[k] = red[0] // n
    lines = []
    for k in range(1, (n + 1) // 2):
        if mult[k] != mult[n - k]:
            raise ArithmeticError("character is not real")
        lines += [k] * mult[k]
    sign = mult[n // 2] if n % 2 == 0 else 0
    return RepSum.of(n, lines, mult[0], sign)


def chern_top(r: RepSum) -> CohRingElement:
    """Top Chern class prod_i c1(V^k_i) = (prod_i k_i) U^dim in Z[U]/4U."""
    if r.n != 4:
        raise OrderMismatch("Chern classes are implemented for Z4 only")
    if not r.is_complex:
        raise ValueError(f"{r} has an unpaired real line and carries no complex structure")
    dim = r.complex_dim + r.real_trivial // 2
    coeff = 0 if r.real_trivial else 1
    for k in r.lines:
        coeff *= k
    return CohRingElement.mono(Z4_RING, 2 * dim, coeff)


def total_chern(r: RepSum) -> CohRingElement:
    """prod_i (1 + k_i U)."""
    out = CohRingElement.mono(Z4_RING, 0, 1)
    for k in r.lines:
        out = out * (CohRingElement.mono(Z4_RING, 0, 1) + CohRingElement.mono(Z4_RING, 2, k))
    return out


def sphere_index(r: RepSum, bound: int = 12) -> GradedIdeal:
    """Index of the unit sphere S(r): the ideal generated by its top Chern class."""
    if r.real_trivial or 0 in r.lines:
        raise TrivialSummand(f"{r} has a trivial summand; its sphere has fixed points")
    return GradedIdeal(Z4_RING, [chern_top(r)], bound)


def test_rep_u4xu2() -> RealRep:
    """The target representation U4 x U2 of the test map."""
    return real_direct_sum(u4_rep(), u2_rep())


def test_rep_index(coeff: str = "Z", bound: int = 12) -> GradedIdeal:
    ideal = sphere_index(decompose(test_rep_u4xu2()), bound)
    return ideal if coeff == "Z" else mod2_reduce_ideal(ideal)
