"""The rings H^*(Z4; Z) = Z[U]/4U and H^*(Z4; F2) = F2[e, u]/e^2, and their ideals.

Both rings have at most one monomial per degree (U^k in degree 2k; e^a u^b
in degree a + 2b), so an element is a map degree -> coefficient and a graded
ideal is, per degree, a cyclic subgroup of the coefficient group.  The
subgroup of Z/m generated by g is stored as gcd(g, m); in degree 0 of the
integral ring (coefficients Z) it is stored as |g|, with 0 meaning trivial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from math import gcd

DEFAULT_BOUND = 12

Z4_RING = "Z"
F2_RING = "F2"


class RingMismatch(ValueError):
    pass


class DegreeOutOfRange(ValueError):
    pass


def coefficient_modulus(ring: str, degree: int) -> int | None:
    """Order of the coefficient group in ``degree``: None for Z, 1 for the zero group."""
    if ring == Z4_RING:
        if degree == 0:
            return None
        return 4 if degree % 2 == 0 else 1
    if ring == F2_RING:
        return 2
    raise ValueError(f"unknown ring {ring!r}")


def monomial(ring: str, degree: int) -> str:
    if ring == Z4_RING:
        k = degree // 2
        return "1" if k == 0 else ("U" if k == 1 else f"U^{k}")
    a, b = degree % 2, degree // 2
    parts = (["e"] if a else []) + ([] if b == 0 else ["u" if b == 1 else f"u^{b}"])
    return "*".join(parts) or "1"


def _reduce(ring: str, degree: int, c: int) -> int:
    m = coefficient_modulus(ring, degree)
    return c if m is None else c % m


@dataclass(frozen=True)
class CohRingElement:
    ring: str
    coeffs: tuple[tuple[int, int], ...]  # sorted (degree, coefficient) with non-zero coefficients

    @classmethod
    def make(cls, ring: str, coeffs: dict[int, int]) -> "CohRingElement":
        clean = {}
        for d, c in coeffs.items():
            if d < 0:
                raise ValueError("negative degree")
            c = _reduce(ring, d, int(c))
            if c:
                clean[d] = c
        return cls(ring, tuple(sorted(clean.items())))

    @classmethod
    def zero(cls, ring: str = Z4_RING) -> "CohRingElement":
        return cls(ring, ())

    @classmethod
    def mono(cls, ring: str, degree: int, c: int = 1) -> "CohRingElement":
        return cls.make(ring, {degree: c})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degrees(self) -> list[int]:
        return [d for d, _ in self.coeffs]

    def coefficient(self, degree: int) -> int:
        return dict(self.coeffs).get(degree, 0)

    def __add__(self, other: "CohRingElement") -> "CohRingElement":
        _same(self, other)
        out = dict(self.coeffs)
        for d, c in other.coeffs:
            out[d] = out.get(d, 0) + c
        return CohRingElement.make(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, int):
            return CohRingElement.make(self.ring, {d: c * other for d, c in self.coeffs})
        _same(self, other)
        out: dict[int, int] = {}
        for d1, c1 in self.coeffs:
            for d2, c2 in other.coeffs:
                if self.ring == F2_RING and d1 % 2 and d2 % 2:
                    continue  # e^2 = 0
                out[d1 + d2] = out.get(d1 + d2, 0) + c1 * c2
        return CohRingElement.make(self.ring, out)

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for d, c in self.coeffs:
            mono = monomial(self.ring, d)
            if mono == "1":
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms)


def _same(a, b) -> None:
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")


_TERM = re.compile(r"^\s*(-?\d*)\s*\*?\s*((?:[eEuU](?:\^\d+)?\s*\*?\s*)*)$")
_FACTOR = re.compile(r"([eEuU])(?:\^(\d+))?")


def parse_element(text: str, ring: str | None = None) -> CohRingElement:
    """Parse "2U^2", "u^3", "e*u^2", "eu^2", "U^3 + 2U" ...

    The ring is inferred from the letters (U: integral, e/u: mod 2) unless given.
    """
    text = text.strip()
    terms = [t for t in re.split(r"\+", text) if t.strip()]
    found_ring = ring
    coeffs: dict[int, int] = {}
    for term in terms:
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse ring element {term!r}")
        num, mono = m.group(1), m.group(2)
        c = int(num) if num not in ("", "-") else (-1 if num == "-" else 1)
        degree = 0
        e_count = 0
        for letter, exp in _FACTOR.findall(mono):
            k = int(exp) if exp else 1
            r = Z4_RING if letter == "U" else F2_RING
            if found_ring is None:
                found_ring = r
            elif found_ring != r:
                raise RingMismatch(f"mixed ring letters in {text!r}")
            if letter in "eE":
                e_count += k
                degree += k
            else:
                degree += 2 * k
        if e_count > 1:
            c = 0
        coeffs[degree] = coeffs.get(degree, 0) + c
    return CohRingElement.make(found_ring or Z4_RING, coeffs)


class GradedIdeal:
    """Ideal generated by ``gens``, tabulated through ``bound``."""

    def __init__(self, ring: str, gens=(), bound: int = DEFAULT_BOUND):
        self.ring = ring
        self.bound = bound
        self.gens = []
        for g in gens:
            if g.ring != ring:
                raise RingMismatch(f"generator {g} is not in ring {ring}")
            self.gens.append(g)
        self.table = self._saturate()

    def _saturate(self) -> dict[int, int]:
        table = {}
        for d in range(self.bound + 1):
            m = coefficient_modulus(self.ring, d)
            acc = 0 if m is None else m
            for g in self.gens:
                for gd, gc in g.coeffs:
                    if gd > d:
                        continue
                    prod = CohRingElement.mono(self.ring, d - gd) * CohRingElement.mono(self.ring, gd, gc)
                    acc = gcd(acc, prod.coefficient(d))
            table[d] = acc if m is not None else abs(acc)
        return table

    @classmethod
    def from_table(cls, ring: str, table: dict[int, int], bound: int | None = None) -> "GradedIdeal":
        """Ideal with the given per-degree subgroups; raises if the table is not multiplicatively closed."""
        bound = max(table) if bound is None else bound

        def wanted(d):
            m = coefficient_modulus(ring, d)
            if m is None:
                return abs(table.get(d, 0))
            return gcd(table.get(d, m), m)

        gens = []
        current = cls(ring, [], bound)
        for d in range(bound + 1):
            if current.table[d] != wanted(d):
                gens.append(CohRingElement.mono(ring, d, wanted(d)))
                current = cls(ring, gens, bound)
        if any(current.table[d] != wanted(d) for d in range(bound + 1)):
            raise ValueError("per-degree table is not closed under multiplication")
        return current

    def subgroup(self, degree: int) -> list[int]:
        """Elements of the ideal in ``degree`` (finite degrees only)."""
        m = coefficient_modulus(self.ring, degree)
        if m is None:
            raise ValueError("degree 0 of the integral ring is infinite")
        g = self.table[degree]
        return sorted({(k * g) % m for k in range(m)})

    def contains(self, x: CohRingElement) -> bool:
        if x.ring != self.ring:
            raise RingMismatch(f"{x.ring} element vs {self.ring} ideal")
        for d, c in x.coeffs:
            if d > self.bound:
                raise DegreeOutOfRange(f"degree {d} exceeds bound {self.bound}")
            g = self.table[d]
            if g == 0 or c % g:
                return False
        return True

    def minimal_generators(self) -> list[CohRingElement]:
        return GradedIdeal.from_table(self.ring, self.table, self.bound).gens

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedIdeal):
            return NotImplemented
        b = min(self.bound, other.bound)
        return self.ring == other.ring and all(self.table[d] == other.table[d] for d in range(b + 1))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(v == (coefficient_modulus(self.ring, d) or 0) for d, v in self.table.items())

    def __str__(self) -> str:
        gens = self.minimal_generators()
        return "<" + ", ".join(str(g) for g in gens) + ">" if gens else "<0>"

    __repr__ = __str__


def ideal_from_generators(gens, degree_bound: int = DEFAULT_BOUND, ring: str | None = None) -> GradedIdeal:
    gens = [parse_element(g, ring) if isinstance(g, str) else g for g in gens]
    rings = {g.ring for g in gens}
    if len(rings) > 1:
        raise RingMismatch(f"generators from several rings: {sorted(rings)}")
    r = rings.pop() if rings else (ring or Z4_RING)
    if ring is not None and r != ring:
        raise RingMismatch(f"generators in {r}, expected {ring}")
    return GradedIdeal(r, gens, degree_bound)


def parse_ideal(text: str, ring: str | None = None, degree_bound: int = DEFAULT_BOUND) -> GradedIdeal:
    """Parse "<2U^2>" or "eu^2, u^3"."""
    body = text.strip().lstrip("<(").rstrip(">)")
    parts = [p for p in body.split(",") if p.strip()]
    gens = [parse_element(p, ring) for p in parts]
    if ring is None:
        ring = gens[0].ring if gens else Z4_RING
    return ideal_from_generators(gens, degree_bound, ring)


def contains(i: GradedIdeal, x: CohRingElement | str) -> bool:
    if isinstance(x, str):
        x = parse_element(x, i.ring)
    return i.contains(x)


def ideal_contains_ideal(a: GradedIdeal, b: GradedIdeal) -> bool:
    """a contains b."""
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    return all(a.contains(g) for g in b.gens)


def mod2_reduce_element(x: CohRingElement) -> CohRingElement:
    """j^*: U^k -> u^k, coefficients mod 2."""
    if x.ring != Z4_RING:
        raise RingMismatch("reduction expects an integral element")
    return CohRingElement.make(F2_RING, {d: c for d, c in x.coeffs})


def mod2_reduce_ideal(i: GradedIdeal) -> GradedIdeal:
    if i.ring != Z4_RING:
        raise RingMismatch("reduction expects an integral ideal")
    return GradedIdeal(F2_RING, [mod2_reduce_element(g) for g in i.gens], i.bound)


class Verdict(str, Enum):
    NO_EQUIVARIANT_MAP = "NoEquivariantMap"
    INCONCLUSIVE = "Inconclusive"


def no_map_verdict(index_domain: GradedIdeal, index_target: GradedIdeal) -> Verdict:
    """An equivariant map X -> Y forces Index(X) to contain Index(Y)."""
    if ideal_contains_ideal(index_domain, index_target):
        return Verdict.INCONCLUSIVE
    return Verdict.NO_EQUIVARIANT_MAP
