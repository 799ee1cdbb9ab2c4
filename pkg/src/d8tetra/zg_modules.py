"""Lattice models of modules over the group ring of a cyclic group.

A module is a free abelian group Z^rank together with the matrix by which the
group generator acts (columns are images of basis vectors).  The named
modules are the ones that appear in the cohomology of the tetrahedron
configuration space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact_linalg import (
    Lattice, identity, int_det, int_inverse, int_matrix, is_zero, matmul, matpow,
    smith_normal_form,
)

MODULE_NAMES = ("trivial", "regular", "coset2", "M", "N", "L", "sign")


class UnknownName(ValueError):
    pass


class BadOrder(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CyclicGroupSpec:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise BadOrder(f"group order must be >= 1, got {self.n}")


Z4 = CyclicGroupSpec(4)


@dataclass(frozen=True, eq=False)
class ZGModule:
    """Z^rank with an action of the generator of Z_n.

    ``coeff`` is ``"Z"`` for integral modules and ``"F2"`` after reduction.
    """

    n: int
    action: np.ndarray
    label: str = ""
    coeff: str = "Z"

    def __post_init__(self):
        a = int_matrix(self.action, 0, 0)
        object.__setattr__(self, "action", a)
        if a.shape[0] != a.shape[1]:
            raise ValueError("action matrix must be square")
        if self.coeff == "Z":
            if a.shape[0] and abs(int_det(a)) != 1:
                raise ValueError(f"action of {self.label!r} is not invertible over Z")
            if not _is_identity(matpow(a, self.n)):
                raise BadOrder(f"action of {self.label!r} does not have order dividing {self.n}")
        elif self.coeff == "F2":
            p = matpow(a, self.n)
            if not _is_identity(np.vectorize(lambda v: v % 2, otypes=[object])(p) if p.size else p):
                raise BadOrder(f"action of {self.label!r} does not have order dividing {self.n} mod 2")
        else:
            raise ValueError(f"unknown coefficient ring {self.coeff!r}")

    @property
    def rank(self) -> int:
        return self.action.shape[0]

    @property
    def group(self) -> CyclicGroupSpec:
        return CyclicGroupSpec(self.n)

    def norm_matrix(self) -> np.ndarray:
        """1 + A + ... + A^(n-1)."""
        out = np.zeros((self.rank, self.rank), dtype=object)
        p = identity(self.rank)
        for _ in range(self.n):
            out = out + p
            p = matmul(p, self.action)
        return out

    def __repr__(self) -> str:
        return f"ZGModule({self.label or '?'}, n={self.n}, rank={self.rank}, {self.coeff})"


def _is_identity(m) -> bool:
    m = np.asarray(m, dtype=object)
    return all(m[i, j] == (1 if i == j else 0) for i in range(m.shape[0]) for j in range(m.shape[1]))


def cyclic_shift(k: int) -> np.ndarray:
    """Permutation matrix sending e_i to e_{i+1 mod k}."""
    a = np.zeros((k, k), dtype=object)
    for i in range(k):
        a[(i + 1) % k, i] = 1
    return a


def coset_module(n: int, d: int) -> ZGModule:
    """Z[Z_n / Z_d] for the subgroup of order d; rank n/d, cyclic shift."""
    if d < 1 or n % d:
        raise BadOrder(f"{d} does not divide {n}")
    return ZGModule(n, cyclic_shift(n // d), f"Z[Z{n}/Z{d}]")


def named_module(name: str, g: CyclicGroupSpec | int = Z4) -> ZGModule:
    """One of trivial, regular, coset2, M, N, L (and sign, Z with -1).

    M, N and L require n = 4; coset2 requires n even.
    """
    n = g.n if isinstance(g, CyclicGroupSpec) else int(g)
    CyclicGroupSpec(n)
    if name == "trivial":
        return ZGModule(n, [[1]], "Z")
    if name == "regular":
        return ZGModule(n, cyclic_shift(n), f"Z[Z{n}]")
    if name == "coset2":
        if n % 2:
            raise BadOrder("coset2 needs an even group order")
        m = coset_module(n, 2)
        return ZGModule(n, m.action, f"Z[Z{n}/Z2]")
    if name == "sign":
        if n % 2:
            raise BadOrder("sign needs an even group order")
        return ZGModule(n, [[-1]], "Z^-")
    if name in ("M", "N", "L"):
        if n != 4:
            raise BadOrder(f"module {name} is only defined for Z4")
        if name == "M":
            # basis: images of x1, x2, x3 in Z[Z4]/(norm); x4 = -(x1+x2+x3)
            return ZGModule(4, [[0, 0, -1], [1, 0, -1], [0, 1, -1]], "M")
        if name == "N":
            # w.(a, b) = (b, -a)
            return ZGModule(4, [[0, 1], [-1, 0]], "N")
        # Z[Z4] / alpha(N) with alpha(p, q) = (p, q, -p, -q): x3 = x1, x4 = x2
        return ZGModule(4, [[0, 1], [1, 0]], "L")
    raise UnknownName(f"unknown module {name!r}; expected one of {MODULE_NAMES}")


def zero_module(n: int) -> ZGModule:
    return ZGModule(n, np.zeros((0, 0), dtype=object), "0")


def direct_sum(a: ZGModule, b: ZGModule, label: str | None = None) -> ZGModule:
    if a.n != b.n:
        raise OrderMismatch(f"cannot add modules over Z{a.n} and Z{b.n}")
    if a.coeff != b.coeff:
        raise OrderMismatch("coefficient rings differ")
    r = a.rank + b.rank
    act = np.zeros((r, r), dtype=object)
    act[:a.rank, :a.rank] = a.action
    act[a.rank:, a.rank:] = b.action
    if label is None:
        label = " + ".join(x for x in (a.label, b.label) if x and x != "0") or "0"
    return ZGModule(a.n, act, label, a.coeff)


def twist(m: ZGModule, sign: int) -> ZGModule:
    """Tensor with the character sending the generator to ``sign`` (+1 or -1)."""
    if sign == 1:
        return m
    return ZGModule(m.n, -m.action, f"{m.label}(x)sign", m.coeff)


def mod2_reduce(m: ZGModule) -> ZGModule:
    act = np.vectorize(lambda v: int(v) % 2, otypes=[object])(m.action) if m.rank else m.action
    return ZGModule(m.n, act, f"{m.label}/2", "F2")


def is_equivariant(f, src: ZGModule, tgt: ZGModule) -> bool:
    """f @ A_src == A_tgt @ f."""
    f = int_matrix(f, tgt.rank, src.rank)
    return is_zero(matmul(f, src.action) - matmul(tgt.action, f))


def submodule(m: ZGModule, basis, label: str = "") -> ZGModule:
    """Restriction of the action to an invariant saturated sublattice (columns of ``basis``)."""
    basis = int_matrix(basis, m.rank, 0)
    lat = Lattice(basis, m.rank)
    k = lat.rank
    if k != basis.shape[1]:
        raise ValueError("submodule generators are not independent")
    act = np.zeros((k, k), dtype=object)
    for j in range(k):
        c = lat.coords(matmul(m.action, basis[:, j:j + 1])[:, 0])
        if c is None:
            raise ValueError("sublattice is not invariant")
        act[:, j] = c
    # act holds images in the lattice's internal basis; convert to the given one
    to_given = np.zeros((k, k), dtype=object)
    for j in range(k):
        to_given[:, j] = lat.coords(basis[:, j])
    act = matmul(int_inverse(to_given), act)
    return ZGModule(m.n, act, label)


def quotient_module(m: ZGModule, sub_gens, label: str = "") -> tuple[ZGModule, np.ndarray]:
    """Quotient of ``m`` by an invariant saturated sublattice.

    Returns the quotient module and the projection matrix Z^rank -> Z^(rank-k).
    Raises ValueError if the quotient has torsion or the sublattice is not invariant.
    """
    sub = int_matrix(sub_gens, m.rank, 0)
    snf = smith_normal_form(sub)
    k = snf.rank
    if any(d != 1 for d in snf.invariants[:k]):
        raise ValueError("sublattice is not saturated; the quotient has torsion")
    L = snf.left
    Linv = int_inverse(L)
    conj = matmul(L, matmul(m.action, Linv))
    if not is_zero(conj[k:, :k]):
        raise ValueError("sublattice is not invariant under the action")
    proj = L[k:, :]
    return ZGModule(m.n, conj[k:, k:], label, m.coeff), proj
