"""Exact integer and mod-2 linear algebra.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so no
entry can overflow during pivoting.  Everything here is small (at most a few
dozen rows), so the algorithms favour clarity over asymptotics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np


class CompositionNonzero(ValueError):
    """Raised when ``d_out @ d_in`` is not the zero map."""


def int_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``data`` to an object-dtype integer matrix.

    ``rows``/``cols`` are only needed to give empty inputs a shape.
    """
    if isinstance(data, np.ndarray) and data.ndim == 2 and data.size == 0:
        return np.zeros(data.shape, dtype=object)
    arr = np.array(data, dtype=object)
    if arr.size == 0:
        r = rows if rows is not None else 0
        c = cols if cols is not None else 0
        return np.zeros((r, c), dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        iv = int(v)
        if iv != v:
            raise ValueError(f"non-integer entry {v!r}")
        out[idx] = iv
    return out


def identity(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=object)
    for i in range(n):
        m[i, i] = 1
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = int_matrix(a)
    b = int_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=object)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            out[i, j] = sum((a[i, k] * b[k, j] for k in range(a.shape[1])), 0)
    return out


def matpow(a: np.ndarray, k: int) -> np.ndarray:
    out = identity(a.shape[0])
    for _ in range(k):
        out = matmul(out, a)
    return out


def is_zero(m: np.ndarray) -> bool:
    return all(v == 0 for v in np.asarray(m).flat)


def int_det(m: np.ndarray) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    a = [[int(v) for v in row] for row in int_matrix(m)]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def int_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a unimodular integer matrix (raises if not unimodular)."""
    m = int_matrix(m)
    n = m.shape[0]
    a = [[Fraction(int(m[i, j])) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            v = a[i][n + j]
            if v.denominator != 1:
                raise ValueError("matrix is not unimodular")
            out[i, j] = int(v)
    return out


@dataclass(frozen=True)
class FinAbGroup:
    """Finitely generated abelian group Z^free_rank + Z/d1 + ... + Z/dk, d1 | d2 | ..."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not a divisibility chain")

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FinAbGroup":
        """Canonical form of Z/o1 + Z/o2 + ... (order 0 means a free Z, 1 is dropped)."""
        free = sum(1 for o in orders if o == 0)
        # primary decomposition, then regroup into an invariant factor chain
        prime_powers: dict[int, list[int]] = {}
        for o in orders:
            o = abs(o)
            if o <= 1:
                continue
            p = 2
            while o > 1:
                if o % p == 0:
                    e = 1
                    while o % p == 0:
                        o //= p
                        e *= p
                    prime_powers.setdefault(p, []).append(e)
                p += 1
        length = max((len(v) for v in prime_powers.values()), default=0)
        chain = [1] * length
        for powers in prime_powers.values():
            powers.sort()
            for k, e in enumerate(powers):
                chain[length - len(powers) + k] *= e
        return cls(free, tuple(chain))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        """Cardinality, or None if infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.insert(0, "Z")
        elif self.free_rank > 1:
            parts.insert(0, f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SNFResult:
    left: np.ndarray
    diag: np.ndarray
    right: np.ndarray

    @property
    def invariants(self) -> list[int]:
        n = min(self.diag.shape)
        return [int(self.diag[i, i]) for i in range(n)]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariants if d != 0)


def smith_normal_form(m) -> SNFResult:
    """Smith normal form ``left @ m @ right == diag``.

    Pivots are chosen with minimal absolute value to limit entry growth.
    The diagonal is non-negative and forms a divisibility chain.
    """
    a = int_matrix(m)
    nr, nc = a.shape
    a = [[int(v) for v in row] for row in a]
    L = [[int(i == j) for j in range(nr)] for i in range(nr)]
    R = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        L[dst] = [x + q * y for x, y in zip(L[dst], L[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in R:
            row[dst] += q * row[src]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    clean = clean and a[i][t] == 0
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    clean = clean and a[t][j] == 0
            if not clean:
                cand = [(abs(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, nc) if a[t][j]]
                _, i, j = min(cand)
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            L[t] = [-x for x in L[t]]
        t += 1

    return SNFResult(int_matrix(L, nr, nr), int_matrix(a, nr, nc), int_matrix(R, nc, nc))


def kernel_basis(m) -> np.ndarray:
    """Columns form a Z-basis of the integer kernel of ``m``."""
    m = int_matrix(m)
    snf = smith_normal_form(m)
    return snf.right[:, snf.rank:]


class Lattice:
    """Sublattice of Z^n spanned by the columns of ``gens``."""

    def __init__(self, gens, n: int):
        g = int_matrix(gens, n, 0)
        if g.shape[0] != n:
            raise ValueError(f"generators live in Z^{g.shape[0]}, expected Z^{n}")
        self.n = n
        snf = smith_normal_form(g)
        self._left = snf.left
        self._diag = [d for d in snf.invariants if d != 0]
        self.rank = len(self._diag)
        linv = int_inverse(snf.left) if n else identity(0)
        basis = np.zeros((n, self.rank), dtype=object)
        for i, d in enumerate(self._diag):
            basis[:, i] = linv[:, i] * d
        self.basis = basis

    def coords(self, x) -> list[int] | None:
        """Coordinates of ``x`` in ``self.basis``, or None if ``x`` is outside."""
        x = [int(v) for v in np.asarray(x, dtype=object).reshape(-1)]
        y = [sum(int(self._left[i, k]) * x[k] for k in range(self.n)) for i in range(self.n)]
        if any(y[i] for i in range(self.rank, self.n)):
            return None
        out = []
        for i, d in enumerate(self._diag):
            if y[i] % d:
                return None
            out.append(y[i] // d)
        return out

    def contains(self, x) -> bool:
        return self.coords(x) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(other.basis[:, i]) for i in range(other.rank))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return self.n == other.n and self.contains_lattice(other) and other.contains_lattice(self)

    __hash__ = None


class Subquotient:
    """The group K/I for lattices I <= K <= Z^n, with explicit generators.

    ``generators`` are representatives in Z^n; ``orders`` gives each
    generator's order (0 for a free generator).  Torsion generators come
    first, in divisibility order.
    """

    def __init__(self, sub_gens, rel_gens, n: int):
        self.n = n
        self.sub = Lattice(sub_gens, n)
        rel = int_matrix(rel_gens, n, 0)
        r = self.sub.rank
        rel_coords = np.zeros((r, rel.shape[1]), dtype=object)
        for j in range(rel.shape[1]):
            c = self.sub.coords(rel[:, j])
            if c is None:
                raise ValueError("relation lattice is not contained in the subgroup")
            rel_coords[:, j] = c
        snf = smith_normal_form(rel_coords)
        self._left = snf.left
        inv = snf.invariants + [0] * (r - len(snf.invariants))
        linv = int_inverse(snf.left) if r else identity(0)
        keep = [i for i in range(r) if inv[i] != 1]
        self._keep = keep
        self.orders = [inv[i] for i in keep]
        gens = []
        signs = []
        for i in keep:
            v = matmul(self.sub.basis, linv[:, i:i + 1])[:, 0] if r else np.zeros(n, dtype=object)
            first = next((x for x in v if x != 0), 0)
            s = -1 if first < 0 else 1
            gens.append(v * s)
            signs.append(s)
        self._signs = signs
        self.generators = gens
        self.group = FinAbGroup.from_orders(self.orders)

    def __len__(self) -> int:
        return len(self.generators)

    def coords(self, x) -> list[int]:
        """Class of ``x`` (which must lie in K) in generator coordinates."""
        c = self.sub.coords(x)
        if c is None:
            raise ValueError("vector does not lie in the subgroup")
        r = self.sub.rank
        z = [sum(int(self._left[i, k]) * c[k] for k in range(r)) for i in range(r)]
        out = []
        for pos, i in enumerate(self._keep):
            v = z[i] * self._signs[pos]
            o = self.orders[pos]
            out.append(v % o if o else v)
        return out

    def is_zero_class(self, x) -> bool:
        return not any(self.coords(x))

    def lift(self, coords) -> np.ndarray:
        out = np.zeros(self.n, dtype=object)
        for c, g in zip(coords, self.generators):
            out = out + int(c) * g
        return out


def homology_at(d_in, d_out) -> Subquotient:
    """ker(d_out) / im(d_in) at the middle of a composable pair."""
    d_in = int_matrix(d_in)
    d_out = int_matrix(d_out)
    if d_in.shape[0] != d_out.shape[1]:
        raise ValueError(f"maps do not compose: {d_in.shape} then {d_out.shape}")
    if not is_zero(matmul(d_out, d_in)):
        raise CompositionNonzero("d_out @ d_in != 0")
    n = d_in.shape[0]
    return Subquotient(kernel_basis(d_out), d_in, n)


# -- mod 2 --------------------------------------------------------------------

def _rref2(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = (np.asarray(m, dtype=np.int64) % 2).astype(np.uint8)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def mod2_rank_kernel(m) -> tuple[int, list[np.ndarray]]:
    """Rank over F2 and a kernel basis (0/1 vectors)."""
    arr = np.asarray(int_matrix(m), dtype=object)
    cols = arr.shape[1]
    red, pivots = _rref2(arr.astype(np.int64) if arr.size else np.zeros(arr.shape, np.int64))
    free = [c for c in range(cols) if c not in pivots]
    kernel = []
    for f in free:
        v = np.zeros(cols, dtype=np.uint8)
        v[f] = 1
        for row, pc in zip(red, pivots):
            if row[f]:
                v[pc] = 1
        kernel.append(v)
    return len(pivots), kernel


class F2Subquotient:
    """K/I over F2 with the same surface as :class:`Subquotient`."""

    def __init__(self, sub_gens: list, rel_gens: list, n: int):
        self.n = n
        sub = [np.asarray(v, dtype=np.int64) % 2 for v in sub_gens]
        if sub:
            # independent subset of the spanning set
            _, piv = _rref2(np.array(sub).T)
            self._basis = [sub[i] for i in piv]
        else:
            self._basis = []
        k = len(self._basis)
        self._bmat = np.array(self._basis, dtype=np.int64).T if k else np.zeros((n, 0), np.int64)
        rel_c = [self._solve(v) for v in rel_gens]
        if rel_c:
            red, piv = _rref2(np.array(rel_c).T)
            self._rel_rows, self._rel_piv = red, piv
        else:
            self._rel_rows, self._rel_piv = np.zeros((0, k), np.uint8), []
        self._free = [j for j in range(k) if j not in self._rel_piv]
        self.orders = [2] * len(self._free)
        self.generators = [np.asarray(self._basis[j], dtype=object) for j in self._free]
        self.group = FinAbGroup(0, tuple(self.orders))

    def _solve(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64) % 2
        k = len(self._basis)
        if k == 0:
            if x.any():
                raise ValueError("vector does not lie in the subspace")
            return np.zeros(0, np.uint8)
        aug = np.concatenate([self._bmat, x.reshape(-1, 1)], axis=1)
        red, piv = _rref2(aug)
        if k in piv:
            raise ValueError("vector does not lie in the subspace")
        sol = np.zeros(k, np.uint8)
        for row, pc in zip(red, piv):
            sol[pc] = row[k]
        return sol

    def __len__(self) -> int:
        return len(self.generators)

    def coords(self, x) -> list[int]:
        c = self._solve(x).copy()
        for row, pc in zip(self._rel_rows, self._rel_piv):
            if c[pc]:
                c ^= row
        return [int(c[j]) for j in self._free]

    def is_zero_class(self, x) -> bool:
        return not any(self.coords(x))

    def lift(self, coords) -> np.ndarray:
        out = np.zeros(self.n, dtype=object)
        for c, g in zip(coords, self.generators):
            out = (out + int(c) * g) % 2
        return out


def homology_at_mod2(d_in, d_out) -> F2Subquotient:
    d_in = np.asarray(int_matrix(d_in), dtype=np.int64) % 2
    d_out = np.asarray(int_matrix(d_out), dtype=np.int64) % 2
    if d_in.shape[0] != d_out.shape[1]:
        raise ValueError("maps do not compose")
    if ((d_out @ d_in) % 2).any():
        raise CompositionNonzero("d_out @ d_in != 0 mod 2")
    _, ker = mod2_rank_kernel(d_out)
    n = d_in.shape[0]
    return F2Subquotient(ker, [d_in[:, j] for j in range(d_in.shape[1])], n)


def hom_kernel(hom, src_orders: Sequence[int], tgt_orders: Sequence[int]) -> Lattice:
    """Kernel of a map between presented groups, as a lattice in Z^len(src).

    ``hom`` acts on coordinates: column j is the image of source generator j.
    The result contains the source relations o_j * e_j.
    """
    hom = int_matrix(hom, len(tgt_orders), len(src_orders))
    m, t = len(src_orders), len(tgt_orders)
    rel_cols = [i for i, o in enumerate(tgt_orders) if o]
    big = np.zeros((t, m + len(rel_cols)), dtype=object)
    big[:, :m] = hom
    for k, i in enumerate(rel_cols):
        big[i, m + k] = tgt_orders[i]
    ker = kernel_basis(big)[:m, :]
    gens = [ker[:, j] for j in range(ker.shape[1])]
    for j, o in enumerate(src_orders):
        if o:
            e = np.zeros(m, dtype=object)
            e[j] = o
            gens.append(e)
    return Lattice(np.array(gens, dtype=object).T if gens else np.zeros((m, 0), dtype=object), m)


def hom_image(hom, src_orders: Sequence[int], tgt_orders: Sequence[int]) -> Lattice:
    """Image of a map between presented groups plus the target relations."""
    t = len(tgt_orders)
    hom = int_matrix(hom, t, len(src_orders))
    gens = [hom[:, j] for j in range(hom.shape[1])]
    for i, o in enumerate(tgt_orders):
        if o:
            e = np.zeros(t, dtype=object)
            e[i] = o
            gens.append(e)
    return Lattice(np.array(gens, dtype=object).T if gens else np.zeros((t, 0), dtype=object), t)


def is_exact_at(g_in, f_out, orders_a, orders_b, orders_c) -> bool:
    """Exactness of A --g_in--> B --f_out--> C at B for presented groups."""
    return hom_kernel(f_out, orders_b, orders_c) == hom_image(g_in, orders_a, orders_b)


def gcd_list(values) -> int:
    out = 0
    for v in values:
        out = gcd(out, int(v))
    return out


def int_solve(m, x) -> np.ndarray | None:
    """Some integer solution y of ``m @ y == x``, or None if there is none."""
    m = int_matrix(m)
    x = [int(v) for v in np.asarray(x, dtype=object).reshape(-1)]
    snf = smith_normal_form(m)
    nr, nc = m.shape
    lx = [sum(int(snf.left[i, k]) * x[k] for k in range(nr)) for i in range(nr)]
    inv = snf.invariants
    z = [0] * nc
    for i in range(nr):
        d = inv[i] if i < len(inv) else 0
        if d == 0:
            if lx[i]:
                return None
        elif lx[i] % d:
            return None
        else:
            z[i] = lx[i] // d
    return matmul(snf.right, int_matrix(z, nc, 1))[:, 0] if nc else np.zeros(0, dtype=object)
