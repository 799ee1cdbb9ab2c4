"""Homology of the pairs ((S^k)^4, Y) with Y = {(x, y, x, y)}, as Z4-modules.

H_*((S^k)^m) is free on index subsets of {1..m}; a subset of size j sits in
degree j*k.  The generator of Z4 shifts indices i -> i+1, and for odd k the
reordering of the shifted subset contributes the sign of the sorting
permutation.  The inclusion Y -> X sends y1 -> x1 + x3, y2 -> x2 + x4 and is
multiplicative (cross products), which for k = 2 gives the maps Phi and Psi
of the tetrahedron problem.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .cyclic_cohomology import cohomology
from .exact_linalg import int_det, int_matrix, kernel_basis, matmul, smith_normal_form
from .zg_modules import (
    ZGModule, direct_sum, is_equivariant, named_module, quotient_module, twist,
    zero_module,
)


class UnsupportedShape(ValueError):
    pass


class NotEquivariant(ValueError):
    pass


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class ProductSpace:
    """(S^factor)^copies with Z4 acting by cyclic shift of the factors."""

    factor: int
    copies: int

    def __post_init__(self):
        if self.factor not in (1, 2) or self.copies not in (2, 4):
            raise UnsupportedShape(f"unsupported product (S^{self.factor})^{self.copies}")

    @property
    def dim(self) -> int:
        return self.factor * self.copies

    def basis(self, degree: int) -> list[tuple[int, ...]]:
        """Index subsets (0-based) carrying H_degree."""
        if degree % self.factor:
            return []
        j = degree // self.factor
        if j > self.copies:
            return []
        return list(itertools.combinations(range(self.copies), j))

    def action(self, degree: int) -> np.ndarray:
        """Matrix of the generator on H_degree (shift i -> i+1 mod copies)."""
        basis = self.basis(degree)
        index = {s: k for k, s in enumerate(basis)}
        a = np.zeros((len(basis), len(basis)), dtype=object)
        for col, s in enumerate(basis):
            shifted = [(i + 1) % self.copies for i in s]
            sign = _perm_sign(shifted) if self.factor % 2 else 1
            a[index[tuple(sorted(shifted))], col] = sign
        return a

    def orientation_sign(self) -> int:
        """Action of the generator on the top class."""
        return int(self.action(self.dim)[0, 0])


def label(s: tuple[int, ...], letter: str = "x") -> str:
    return "".join(f"{letter}{i + 1}" for i in s) or "1"


def product_homology(s: ProductSpace) -> dict[int, ZGModule]:
    """H_k(s) for every degree k with its Z4 action."""
    out = {}
    for k in range(s.dim + 1):
        if s.basis(k):
            out[k] = ZGModule(4, s.action(k), f"H_{k}")
    return out


@dataclass
class EquivariantMap:
    source: ZGModule
    target: ZGModule
    matrix: np.ndarray
    degree: int
    name: str = ""

    def __post_init__(self):
        self.matrix = int_matrix(self.matrix, self.target.rank, self.source.rank)

    @property
    def certified(self) -> bool:
        return is_equivariant(self.matrix, self.source, self.target)

    @property
    def injective(self) -> bool:
        return smith_normal_form(self.matrix).rank == self.source.rank


def inclusion_map(x: ProductSpace, y: ProductSpace, degree: int) -> np.ndarray:
    """H_degree(Y) -> H_degree(X) from y_a -> x_a + x_(a+2), extended by cross products."""
    xb = {s: k for k, s in enumerate(x.basis(degree))}
    yb = y.basis(degree)
    m = np.zeros((len(xb), len(yb)), dtype=object)
    for col, s in enumerate(yb):
        # expand prod_a (x_a + x_(a+2)) over the factors in s, in order
        for choice in itertools.product(*[(a, a + 2) for a in s]):
            if len(set(choice)) < len(choice):
                continue
            sign = _perm_sign(choice) if x.factor % 2 else 1
            m[xb[tuple(sorted(choice))], col] += sign
    return m


def sphere_pair(factor: int = 2) -> tuple[ProductSpace, ProductSpace]:
    return ProductSpace(factor, 4), ProductSpace(factor, 2)


def pair_maps(factor: int = 2) -> dict[int, EquivariantMap]:
    """Inclusion-induced maps in every degree where H_*(Y) is non-zero."""
    x, y = sphere_pair(factor)
    hx, hy = product_homology(x), product_homology(y)
    out = {}
    for k, ym in hy.items():
        out[k] = EquivariantMap(ym, hx[k], inclusion_map(x, y, k), k, f"incl_{k}")
    return out


# the two maps written out by hand for the sphere case
PHI = [[1, 0], [0, 1], [1, 0], [0, 1]]
# H_4(X) basis order: x1x2, x1x3, x1x4, x2x3, x2x4, x3x4
PSI = [[1], [0], [1], [1], [0], [1]]


@dataclass
class RelativeHomologyTable:
    factor: int
    modules: dict[int, ZGModule] = field(default_factory=dict)
    projections: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def top(self) -> int:
        return 4 * self.factor

    def __getitem__(self, k: int) -> ZGModule:
        return self.modules.get(k, zero_module(4))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * m.rank for k, m in self.modules.items())


def relative_table(factor: int = 2, maps: dict[int, EquivariantMap] | None = None) -> RelativeHomologyTable:
    """H_k(X, Y) from the long exact sequence of the pair.

    All inclusion maps here are injective, so H_k(X, Y) = coker(H_k(Y) -> H_k(X))
    and the kernel contributions in degree k+1 vanish.
    """
    x, _ = sphere_pair(factor)
    hx = product_homology(x)
    maps = maps if maps is not None else pair_maps(factor)
    table = RelativeHomologyTable(factor)
    for k, f in maps.items():
        if not f.certified:
            raise NotEquivariant(f"inclusion map in degree {k} is not equivariant")
        if not f.injective:
            raise ValueError(f"inclusion map in degree {k} is not injective")
    for k in range(x.dim + 1):
        if k not in hx:
            continue
        if k in maps:
            q, proj = quotient_module(hx[k], maps[k].matrix, f"H_{k}(X,Y)")
        else:
            q, proj = hx[k], np.eye(hx[k].rank, dtype=int).astype(object)
            q = ZGModule(4, q.action, f"H_{k}(X,Y)")
        if q.rank:
            table.modules[k] = q
            table.projections[k] = proj
    return table


def dual_cohomology(t: RelativeHomologyTable, top: int | None = None) -> dict[int, ZGModule]:
    """H^i(X - Y) := H_(top - i)(X, Y), twisted by the orientation character of X."""
    top = t.top if top is None else top
    if top != t.top:
        raise ValueError(f"top degree {top} does not match the pair (expected {t.top})")
    x, _ = sphere_pair(t.factor)
    sign = x.orientation_sign()
    out = {}
    for k, m in t.modules.items():
        out[top - k] = ZGModule(4, twist(m, sign).action, f"H^{top - k}")
    return dict(sorted(out.items()))


# -- identification of modules ------------------------------------------------

def charpoly(a) -> list[int]:
    """Integer characteristic polynomial coefficients (leading 1 first), Faddeev-LeVerrier."""
    a = int_matrix(a, 0, 0)
    n = a.shape[0]
    coeffs = [1]
    m = np.zeros((n, n), dtype=object)
    ident = np.eye(n, dtype=int).astype(object)
    for k in range(1, n + 1):
        m = matmul(a, m) + coeffs[-1] * ident
        am = matmul(a, m)
        c = -sum(am[i, i] for i in range(n))
        if c % k:
            raise ArithmeticError("non-integral characteristic polynomial")
        coeffs.append(c // k)
    return [int(c) for c in coeffs]


def fingerprint(m: ZGModule, degrees: int = 4) -> dict:
    """Isomorphism invariants of a module."""
    ident = np.eye(m.rank, dtype=int).astype(object)
    coinv = smith_normal_form(m.action - ident)
    coinv_orders = [d for d in coinv.invariants if d != 1] + [0] * (m.rank - coinv.rank)
    from .exact_linalg import FinAbGroup
    return {
        "rank": m.rank,
        "charpoly": charpoly(m.action),
        "invariants_rank": m.rank - smith_normal_form(m.action - ident).rank,
        "coinvariants": str(FinAbGroup.from_orders(coinv_orders)),
        "cohomology": [str(g) for g in cohomology(m, degrees - 1).as_list()] if m.rank else [],
    }


def intertwiner_basis(src: ZGModule, tgt: ZGModule) -> list[np.ndarray]:
    """Z-basis of {P : P A_src = A_tgt P} (P has shape tgt.rank x src.rank)."""
    r, c = tgt.rank, src.rank
    cols = []
    for i in range(r):
        for j in range(c):
            e = np.zeros((r, c), dtype=object)
            e[i, j] = 1
            cols.append((matmul(e, src.action) - matmul(tgt.action, e)).reshape(-1))
    if not cols:
        return []
    system = np.array(cols, dtype=object).T
    ker = kernel_basis(system)
    return [ker[:, k].reshape(r, c) for k in range(ker.shape[1])]


def find_isomorphism(src: ZGModule, tgt: ZGModule, radius: int = 3,
                     budget: int = 2_000_000) -> np.ndarray | None:
    """Search for an integral equivariant isomorphism src -> tgt.

    Candidates are small integer combinations (coefficients in [-radius, radius])
    of an intertwiner lattice basis; the search widens the radius gradually.
    """
    if src.rank != tgt.rank or src.n != tgt.n:
        return None
    if src.rank == 0:
        return np.zeros((0, 0), dtype=object)
    basis = intertwiner_basis(src, tgt)
    if not basis:
        return None
    stack = np.array([np.asarray(b, dtype=np.int64) for b in basis])
    k = len(basis)
    tried = 0
    for rad in range(1, radius + 1):
        values = np.arange(-rad, rad + 1)
        total = len(values) ** k
        if tried + total > budget:
            return None
        tried += total
        chunk = 200_000
        combos_iter = itertools.product(values, repeat=k)
        while True:
            block = np.array(list(itertools.islice(combos_iter, chunk)), dtype=np.int64)
            if block.size == 0:
                break
            # only combinations touching the current radius are new
            if rad > 1:
                block = block[np.abs(block).max(axis=1) == rad]
                if not len(block):
                    continue
            mats = np.einsum("nk,kij->nij", block, stack)
            dets = np.round(np.linalg.det(mats.astype(float)))
            for idx in np.nonzero(np.abs(dets) == 1)[0]:
                cand = int_matrix(mats[idx])
                if abs(int_det(cand)) == 1 and is_equivariant(cand, src, tgt):
                    return cand
    return None


@dataclass
class Identification:
    name: str | None
    isomorphism: np.ndarray | None
    fingerprint: dict
    candidate_fingerprints: dict

    @property
    def matched(self) -> bool:
        return self.name is not None


def identify_module(m: ZGModule, candidates: dict[str, ZGModule], radius: int = 3) -> Identification:
    """Match ``m`` against named candidates up to integral equivariant isomorphism."""
    if m.rank > 6:
        raise ValueError("identify_module supports rank <= 6")
    fp = fingerprint(m)
    cfps = {}
    for name, cand in candidates.items():
        cfp = fingerprint(cand)
        cfps[name] = cfp
        if cfp != fp:
            continue
        iso = find_isomorphism(m, cand, radius)
        if iso is not None:
            return Identification(name, iso, fp, cfps)
    return Identification(None, None, fp, cfps)


def standard_candidates() -> dict[str, ZGModule]:
    """Named modules and the sums that occur in the configuration-space cohomology."""
    nm = {k: named_module(k) for k in ("trivial", "regular", "coset2", "M", "N", "L", "sign")}
    out = dict(nm)
    out["M+coset2"] = direct_sum(nm["M"], nm["coset2"])
    out["regular+coset2"] = direct_sum(nm["regular"], nm["coset2"])
    out["M+sign"] = direct_sum(nm["M"], nm["sign"])
    out["N+trivial"] = direct_sum(nm["N"], nm["trivial"])
    out["N+sign"] = direct_sum(nm["N"], nm["sign"])
    out["M+N"] = direct_sum(nm["M"], nm["N"])
    return out
