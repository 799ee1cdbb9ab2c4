"""Test map on four points of an embedded sphere or circle, and a multi-start zero finder.

A configuration is four unit vectors in R^n (n = 3 for spheres, n = 2 for
closed curves).  The embedding sends them into R^m; the test map compares the
four cyclic side lengths with their mean and the two diagonals with theirs.
A zero with four distinct points off the set {(x, y, x, y)} is a tetrahedron
(or, on a curve, a quadrilateral) with equal sides and equal diagonals.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from math import comb
from typing import Callable

import mpmath
import numpy as np

SIDES = ((0, 1), (1, 2), (2, 3), (0, 3))
DIAGONALS = ((0, 2), (1, 3))
PAIRS = SIDES + DIAGONALS

# tau = TAU_MATRIX @ (d12, d23, d34, d14, d13, d24)
TAU_MATRIX = np.zeros((6, 6))
TAU_MATRIX[:4, :4] = np.eye(4) - 0.25
TAU_MATRIX[4:, 4:] = np.eye(2) - 0.5


class NonInjectiveSpec(ValueError):
    pass


# -- polynomials on the unit sphere -------------------------------------------

@dataclass(frozen=True)
class Poly:
    """Real polynomial sum_k coef_k * prod_i x_i^e_ki in n variables."""

    n: int
    terms: tuple[tuple[float, tuple[int, ...]], ...]

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(self.n, self.terms + other.terms)

    def scale(self, c: float) -> "Poly":
        return Poly(self.n, tuple((c * a, e) for a, e in self.terms))

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(pts.shape[0])
        for a, e in self.terms:
            out += a * np.prod(pts ** np.array(e), axis=1)
        return out

    def grad(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros_like(pts, dtype=float)
        for a, e in self.terms:
            for i in range(self.n):
                if e[i] == 0:
                    continue
                e2 = list(e)
                e2[i] -= 1
                out[:, i] += a * e[i] * np.prod(pts ** np.array(e2), axis=1)
        return out

    def eval_mp(self, p) -> mpmath.mpf:
        total = mpmath.mpf(0)
        for a, e in self.terms:
            term = mpmath.mpf(a)
            for x, k in zip(p, e):
                term *= x ** k
            total += term
        return total


def _p(n, *terms) -> Poly:
    return Poly(n, tuple((float(a), tuple(e)) for a, e in terms))


def real_harmonic(l: int, m: int) -> Poly:
    """Orthonormal real spherical harmonic Y_lm (l <= 3) as a homogeneous polynomial in x, y, z.

    m > 0 uses cos(m phi), m < 0 uses sin(|m| phi); no Condon-Shortley phase.
    """
    pi = math.pi
    c1 = math.sqrt(3 / (4 * pi))
    c2 = 0.5 * math.sqrt(15 / pi)
    c20 = 0.25 * math.sqrt(5 / pi)
    c22 = 0.25 * math.sqrt(15 / pi)
    c33 = 0.25 * math.sqrt(35 / (2 * pi))
    c32 = 0.5 * math.sqrt(105 / pi)
    c31 = 0.25 * math.sqrt(21 / (2 * pi))
    c30 = 0.25 * math.sqrt(7 / pi)
    c32b = 0.25 * math.sqrt(105 / pi)
    table = {
        (0, 0): [(0.5 / math.sqrt(pi), (0, 0, 0))],
        (1, -1): [(c1, (0, 1, 0))],
        (1, 0): [(c1, (0, 0, 1))],
        (1, 1): [(c1, (1, 0, 0))],
        (2, -2): [(c2, (1, 1, 0))],
        (2, -1): [(c2, (0, 1, 1))],
        (2, 0): [(2 * c20, (0, 0, 2)), (-c20, (2, 0, 0)), (-c20, (0, 2, 0))],
        (2, 1): [(c2, (1, 0, 1))],
        (2, 2): [(c22, (2, 0, 0)), (-c22, (0, 2, 0))],
        (3, -3): [(3 * c33, (2, 1, 0)), (-c33, (0, 3, 0))],
        (3, -2): [(c32, (1, 1, 1))],
        (3, -1): [(4 * c31, (0, 1, 2)), (-c31, (2, 1, 0)), (-c31, (0, 3, 0))],
        (3, 0): [(2 * c30, (0, 0, 3)), (-3 * c30, (2, 0, 1)), (-3 * c30, (0, 2, 1))],
        (3, 1): [(4 * c31, (1, 0, 2)), (-c31, (3, 0, 0)), (-c31, (1, 2, 0))],
        (3, 2): [(c32b, (2, 0, 1)), (-c32b, (0, 2, 1))],
        (3, 3): [(c33, (3, 0, 0)), (-3 * c33, (1, 2, 0))],
    }
    if (l, m) not in table:
        raise ValueError(f"real harmonic ({l},{m}) is not tabulated (need l <= 3, |m| <= l)")
    return _p(3, *table[(l, m)])


def cos_multiple(k: int) -> Poly:
    """Re((x + iy)^k) = cos(k theta) on the unit circle."""
    terms = []
    for j in range(0, k + 1, 2):
        terms.append(((-1) ** (j // 2) * comb(k, j), (k - j, j)))
    return _p(2, *terms)


# -- embeddings ------------------------------------------------------------------

Metric = Callable[[np.ndarray, np.ndarray], float]


class Embedding:
    """Smooth map from the unit sphere in R^n into R^m."""

    n = 3
    name = "embedding"

    def __init__(self, metric: Metric | None = None):
        self.metric = metric

    def evaluate(self, pts) -> np.ndarray:
        raise NotImplementedError

    def differential(self, pts) -> np.ndarray:
        """Array (k, m, n) of derivatives of any smooth extension off the sphere."""
        raise NotImplementedError

    def evaluate_mp(self, p) -> list:
        raise NotImplementedError

    def describe(self) -> str:
        return self.name

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return self.evaluate(p.reshape(1, -1))[0]


class Linear(Embedding):
    """p -> diag(scales) p: round spheres, ellipsoids, circles and ellipses."""

    def __init__(self, scales, name: str, metric: Metric | None = None):
        super().__init__(metric)
        self.scales = np.asarray(scales, dtype=float)
        if np.any(self.scales <= 0):
            raise NonInjectiveSpec("axis scales must be positive")
        self.n = len(self.scales)
        self.name = name

    def evaluate(self, pts):
        return np.asarray(pts, dtype=float) * self.scales

    def differential(self, pts):
        k = np.asarray(pts).shape[0]
        return np.broadcast_to(np.diag(self.scales), (k, self.n, self.n)).copy()

    def evaluate_mp(self, p):
        return [mpmath.mpf(float(s)) * x for s, x in zip(self.scales, p)]


class Radial(Embedding):
    """p -> r(p) p with r = 1 + poly(p) > 0 on the unit sphere."""

    def __init__(self, poly: Poly, name: str, metric: Metric | None = None, grid: int = 20000):
        super().__init__(metric)
        self.poly = poly
        self.n = poly.n
        self.name = name
        pts = _fibonacci(grid) if self.n == 3 else _circle_grid(grid)
        rmin = float(np.min(1.0 + poly(pts)))
        if rmin <= 0:
            raise NonInjectiveSpec(f"radial function reaches {rmin:.3g} <= 0; the map is not injective")
        self.min_radius = rmin

    def radius(self, pts):
        return 1.0 + self.poly(np.asarray(pts, dtype=float))

    def evaluate(self, pts):
        pts = np.asarray(pts, dtype=float)
        return pts * self.radius(pts)[:, None]

    def differential(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = self.radius(pts)
        g = self.poly.grad(pts)
        return r[:, None, None] * np.eye(self.n) + pts[:, :, None] * g[:, None, :]

    def evaluate_mp(self, p):
        r = 1 + self.poly.eval_mp(p)
        return [r * x for x in p]


def _fibonacci(k: int) -> np.ndarray:
    i = np.arange(k) + 0.5
    z = 1 - 2 * i / k
    phi = math.pi * (1 + 5 ** 0.5) * i
    rho = np.sqrt(1 - z * z)
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)


def _circle_grid(k: int) -> np.ndarray:
    t = 2 * math.pi * np.arange(k) / k
    return np.stack([np.cos(t), np.sin(t)], axis=1)


def round_sphere(radius: float = 1.0, metric: Metric | None = None) -> Linear:
    return Linear([radius] * 3, f"round:{radius:g}", metric)


def ellipsoid(a: float, b: float, c: float, metric: Metric | None = None) -> Linear:
    return Linear([a, b, c], f"ellipsoid:{a:g},{b:g},{c:g}", metric)


def radial_harmonic(coeffs: dict[tuple[int, int], float], metric: Metric | None = None) -> Radial:
    poly = Poly(3, ())
    for (l, m), c in sorted(coeffs.items()):
        poly = poly + real_harmonic(l, m).scale(c)
    desc = ",".join(f"l{l}m{m}={c:g}" for (l, m), c in sorted(coeffs.items()))
    return Radial(poly, f"harmonic:{desc}", metric)


def circle(radius: float = 1.0) -> Linear:
    return Linear([radius] * 2, f"circle:{radius:g}")


def ellipse(a: float, b: float) -> Linear:
    return Linear([a, b], f"ellipse:{a:g},{b:g}")


def star(a: float, k: int) -> Radial:
    if abs(a) >= 1:
        raise NonInjectiveSpec("star curves need |a| < 1")
    return Radial(cos_multiple(k).scale(a), f"star:{a:g},{k}")


def parse_embedding(text: str) -> Embedding:
    """round:R, ellipsoid:a,b,c, harmonic:l2m1=0.15,l3m-2=0.1, circle:R, ellipse:a,b, star:a,k."""
    kind, _, args = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "round":
            return round_sphere(float(args or 1))
        if kind == "ellipsoid":
            return ellipsoid(*[float(x) for x in args.split(",")])
        if kind == "harmonic":
            coeffs = {}
            for item in filter(None, args.split(",")):
                key, val = item.split("=")
                l, m = key.strip().lstrip("l").split("m")
                coeffs[(int(l), int(m))] = float(val)
            return radial_harmonic(coeffs)
        if kind == "circle":
            return circle(float(args or 1))
        if kind == "ellipse":
            return ellipse(*[float(x) for x in args.split(",")])
        if kind == "star":
            a, k = args.split(",")
            return star(float(a), int(k))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, NonInjectiveSpec):
            raise
        raise ValueError(f"bad embedding spec {text!r}: {exc}") from None
    raise ValueError(f"unknown embedding kind {kind!r}")


def lp_metric(p: float) -> Metric:
    """The l^p distance on R^m (a metric for p >= 1)."""
    def dist(a, b):
        return float(np.sum(np.abs(np.asarray(a) - np.asarray(b)) ** p) ** (1.0 / p))
    return dist


def check_metric(metric: Metric, points: np.ndarray, triples: int = 200, seed: int = 0) -> list[str]:
    """Spot-check symmetry, non-negativity and the triangle inequality on sampled points."""
    rng = np.random.default_rng(seed)
    problems = []
    k = len(points)
    for _ in range(triples):
        i, j, l = rng.integers(0, k, size=3)
        a, b, c = points[i], points[j], points[l]
        dab, dba, dbc, dac = metric(a, b), metric(b, a), metric(b, c), metric(a, c)
        if dab < 0:
            problems.append(f"negative distance {dab:g}")
        if abs(dab - dba) > 1e-12 * max(1.0, abs(dab)):
            problems.append(f"asymmetric: {dab:g} vs {dba:g}")
        if dac > dab + dbc + 1e-12 * max(1.0, dac):
            problems.append(f"triangle inequality fails: {dac:g} > {dab:g} + {dbc:g}")
    return problems


# -- configurations and the D8 action ----------------------------------------------

@dataclass(frozen=True, eq=False)
class Config4:
    """Four unit vectors in R^n, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] != 4:
            raise ValueError("a configuration has four points")
        if np.max(np.abs(np.linalg.norm(pts, axis=1) - 1)) > 1e-12:
            raise ValueError("configuration points must be unit vectors")
        object.__setattr__(self, "points", pts)

    @classmethod
    def normalized(cls, pts) -> "Config4":
        pts = np.asarray(pts, dtype=float)
        return cls(pts / np.linalg.norm(pts, axis=1, keepdims=True))

    @classmethod
    def from_angles(cls, angles) -> "Config4":
        a = np.asarray(angles, dtype=float)
        return cls.normalized(np.stack([np.cos(a), np.sin(a)], axis=1))


# Group elements are words in w and j, applied right to left.
D8_ELEMENTS = ("", "w", "ww", "www", "j", "wj", "wwj", "wwwj")
_POINT_PERM = {"w": (1, 2, 3, 0), "j": (3, 2, 1, 0)}
_SIDE_PERM = {"w": (1, 2, 3, 0), "j": (2, 1, 0, 3)}
_DIAG_PERM = {"w": (1, 0), "j": (1, 0)}


def act(word: str, c: Config4) -> Config4:
    pts = c.points
    for letter in reversed(word):
        pts = pts[list(_POINT_PERM[letter])]
    return Config4(pts)


def rho(word: str, t: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Action on U4 x U2."""
    for letter in reversed(word):
        t = t[list(_SIDE_PERM[letter])]
        s = s[list(_DIAG_PERM[letter])]
    return t, s


# -- the test map --------------------------------------------------------------

@dataclass
class DistanceData:
    d: dict[str, float]
    delta: float
    phi_diag: float

    def vector(self) -> np.ndarray:
        return np.array([self.d[_pair_name(i, j)] for i, j in PAIRS])


@dataclass
class TestMapValue:
    t: np.ndarray
    s: np.ndarray

    def vector(self) -> np.ndarray:
        return np.concatenate([self.t, self.s])

    @property
    def norm2(self) -> float:
        return float(np.dot(self.t, self.t) + np.dot(self.s, self.s))


def _pair_name(i: int, j: int) -> str:
    return f"d{i + 1}{j + 1}"


def _distance_vector(e: Embedding, pts: np.ndarray) -> np.ndarray:
    f = e.evaluate(pts)
    if e.metric is None:
        return np.array([np.linalg.norm(f[i] - f[j]) for i, j in PAIRS])
    return np.array([e.metric(f[i], f[j]) for i, j in PAIRS])


def distances(e: Embedding, c: Config4) -> DistanceData:
    v = _distance_vector(e, c.points)
    d = {_pair_name(i, j): float(x) for (i, j), x in zip(PAIRS, v)}
    return DistanceData(d, float(v[:4].sum()), float(v[4:].sum()))


def test_map(e: Embedding, c: Config4) -> TestMapValue:
    tau = TAU_MATRIX @ _distance_vector(e, c.points)
    return TestMapValue(tau[:4], tau[4:])


test_map.__test__ = False  # keep pytest from collecting it


def tangent_basis(p: np.ndarray) -> np.ndarray:
    """Orthonormal basis (n, n-1) of the tangent space at the unit vector p."""
    if p.shape[0] == 2:
        return np.array([[-p[1]], [p[0]]])
    a = np.zeros(3)
    a[int(np.argmin(np.abs(p)))] = 1.0
    u = a - np.dot(a, p) * p
    u /= np.linalg.norm(u)
    w = np.cross(p, u)
    return np.stack([u, w], axis=1)


def retract(pts: np.ndarray, step: np.ndarray) -> np.ndarray:
    """Move each point along its tangent chart coordinates and renormalize."""
    n = pts.shape[1]
    out = np.empty_like(pts)
    for i in range(4):
        v = pts[i] + tangent_basis(pts[i]) @ step[i * (n - 1):(i + 1) * (n - 1)]
        out[i] = v / np.linalg.norm(v)
    return out


def _tau_jacobian(e: Embedding, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """tau and its Jacobian with respect to the 4(n-1) chart coordinates."""
    n = pts.shape[1]
    k = n - 1
    if e.metric is not None:
        return _tau_jacobian_fd(e, pts)
    f = e.evaluate(pts)
    df = e.differential(pts)
    bases = [tangent_basis(p) for p in pts]
    dvec = np.zeros(6)
    jd = np.zeros((6, 4 * k))
    for row, (i, j) in enumerate(PAIRS):
        diff = f[i] - f[j]
        d = np.linalg.norm(diff)
        dvec[row] = d
        if d == 0:
            continue  # subgradient 0
        unit = diff / d
        jd[row, i * k:(i + 1) * k] += unit @ df[i] @ bases[i]
        jd[row, j * k:(j + 1) * k] -= unit @ df[j] @ bases[j]
    return TAU_MATRIX @ dvec, TAU_MATRIX @ jd


def _tau_jacobian_fd(e: Embedding, pts: np.ndarray, h: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    k = pts.shape[1] - 1
    tau0 = TAU_MATRIX @ _distance_vector(e, pts)
    jac = np.zeros((6, 4 * k))
    for col in range(4 * k):
        step = np.zeros(4 * k)
        step[col] = h
        plus = TAU_MATRIX @ _distance_vector(e, retract(pts, step))
        minus = TAU_MATRIX @ _distance_vector(e, retract(pts, -step))
        jac[:, col] = (plus - minus) / (2 * h)
    return tau0, jac


def residual_and_gradient(e: Embedding, c: Config4) -> tuple[float, np.ndarray]:
    """|tau|^2 and its gradient in the tangent chart at ``c``."""
    tau, jac = _tau_jacobian(e, c.points)
    return float(tau @ tau), 2 * jac.T @ tau


def numeric_gradient(e: Embedding, c: Config4, h: float = 1e-6) -> np.ndarray:
    """Central differences of |tau|^2 in the tangent chart."""
    k = c.points.shape[1] - 1
    out = np.zeros(4 * k)
    for col in range(4 * k):
        step = np.zeros(4 * k)
        step[col] = h
        plus = TAU_MATRIX @ _distance_vector(e, retract(c.points, step))
        minus = TAU_MATRIX @ _distance_vector(e, retract(c.points, -step))
        out[col] = (plus @ plus - minus @ minus) / (2 * h)
    return out


# -- margins and extended precision -------------------------------------------------

def _angle2(a, b) -> float:
    return float(math.atan2(abs(a[0] * b[1] - a[1] * b[0]), float(np.dot(a, b))))


def geodesic(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape[0] == 2:
        return _angle2(a, b)
    return float(math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b))))


def distinctness_margin(c: Config4) -> float:
    p = c.points
    return min(geodesic(p[i], p[j]) for i in range(4) for j in range(i + 1, 4))


def distance_to_y(c: Config4) -> float:
    """Geodesic distance in the product metric from c to {(x, y, x, y)}."""
    p = c.points
    a13, a24 = geodesic(p[0], p[2]), geodesic(p[1], p[3])
    return math.sqrt(a13 * a13 / 2 + a24 * a24 / 2)


def residual_mp(e: Embedding, c: Config4, dps: int = 50) -> float:
    """|tau|^2 recomputed in extended precision from the stored coordinates."""
    if e.metric is not None:
        tau = test_map(e, c).vector()
        return float(tau @ tau)
    with mpmath.workdps(dps):
        pts = [[mpmath.mpf(float(x)) for x in row] for row in c.points]
        # renormalize exactly in extended precision so round-off in the stored norm is not counted
        pts = [[x / mpmath.sqrt(sum(y * y for y in row)) for x in row] for row in pts]
        f = [e.evaluate_mp(row) for row in pts]
        d = [mpmath.sqrt(sum((a - b) ** 2 for a, b in zip(f[i], f[j]))) for i, j in PAIRS]
        delta = d[0] + d[1] + d[2] + d[3]
        phi = d[4] + d[5]
        tau = [d[k] - delta / 4 for k in range(4)] + [d[4] - phi / 2, d[5] - phi / 2]
        return float(sum(x * x for x in tau))


# -- solver -----------------------------------------------------------------------

@dataclass
class SolveReport:
    embedding: str
    config: list[list[float]]
    distances: dict[str, float]
    delta: float
    phi_diag: float
    residual: float
    residual_float: float
    margins: dict[str, float]
    certified: bool
    seed: int
    starts: int
    rejected_starts: int = 0
    converged_starts: int = 0
    runtime: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def status(self) -> str:
        return "Certified" if self.certified else "NotCertified"

    def config4(self) -> Config4:
        return Config4.normalized(self.config)

    def to_dict(self) -> dict:
        return {
            "config": {"embedding": self.embedding, "points": self.config},
            "distances": self.distances,
            "delta": self.delta,
            "phi_diag": self.phi_diag,
            "residual": self.residual,
            "margins": self.margins,
            "certified": self.certified,
            "seed": self.seed,
            "starts": self.starts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _random_start(rng: np.random.Generator, n: int, y_margin: float, max_tries: int = 1000):
    """Uniform points on the sphere; on a curve, uniform angles in cyclic order.

    Unordered starts on a curve mostly cross and collapse onto Y under Gauss-Newton.
    """
    for tries in range(max_tries):
        if n == 2:
            c = Config4.from_angles(np.sort(rng.uniform(0.0, 2 * np.pi, 4)))
        else:
            c = Config4.normalized(rng.standard_normal((4, n)))
        if distance_to_y(c) > y_margin:
            return c, tries
    raise RuntimeError("could not draw a start away from Y")


def gauss_newton(e: Embedding, pts: np.ndarray, tol: float, max_iter: int = 100) -> tuple[np.ndarray, float]:
    """Minimum-norm Gauss-Newton steps with backtracking, retracted to the sphere."""
    tau, jac = _tau_jacobian(e, pts)
    res = float(tau @ tau)
    for _ in range(max_iter):
        if res < tol:
            break
        step = -np.linalg.lstsq(jac, tau, rcond=None)[0]
        alpha = 1.0
        improved = False
        while alpha > 1e-8:
            trial = retract(pts, alpha * step)
            t2 = TAU_MATRIX @ _distance_vector(e, trial)
            r2 = float(t2 @ t2)
            if r2 < res:
                pts, improved = trial, True
                break
            alpha *= 0.5
        if not improved:
            break
        tau, jac = _tau_jacobian(e, pts)
        res = float(tau @ tau)
    return pts, res


def _diagonal_gradient(e: Embedding, pts: np.ndarray) -> tuple[float, np.ndarray]:
    """d13 + d24 and its chart gradient."""
    if e.metric is not None:
        base = _distance_vector(e, pts)
        k = pts.shape[1] - 1
        g = np.zeros(4 * k)
        for col in range(4 * k):
            step = np.zeros(4 * k)
            step[col] = 1e-6
            g[col] = ((_distance_vector(e, retract(pts, step))[4:].sum()
                       - _distance_vector(e, retract(pts, -step))[4:].sum()) / 2e-6)
        return float(base[4:].sum()), g
    k = pts.shape[1] - 1
    f = e.evaluate(pts)
    df = e.differential(pts)
    g = np.zeros(4 * k)
    total = 0.0
    for i, j in DIAGONALS:
        diff = f[i] - f[j]
        d = np.linalg.norm(diff)
        total += d
        if d == 0:
            continue
        unit = diff / d
        g[i * k:(i + 1) * k] += unit @ df[i] @ tangent_basis(pts[i])
        g[j * k:(j + 1) * k] -= unit @ df[j] @ tangent_basis(pts[j])
    return total, g


def spread(e: Embedding, pts: np.ndarray, tol: float, max_iter: int = 300) -> tuple[np.ndarray, float]:
    """Increase d13 + d24 along the zero set of tau.

    Each step moves a chart distance ``length`` along the projection of the
    diagonal gradient onto the null space of the Jacobian, then returns to
    the zero set by Gauss-Newton.  The length doubles after a success and
    halves after a failure, so the iteration settles onto a local maximum.
    """
    phi, g = _diagonal_gradient(e, pts)
    length = 0.1
    for _ in range(max_iter):
        if length < 1e-10:
            break
        _, jac = _tau_jacobian(e, pts)
        proj = g - np.linalg.pinv(jac) @ (jac @ g)
        norm = np.linalg.norm(proj)
        if norm < 1e-14:
            break
        trial, res = gauss_newton(e, retract(pts, length * proj / norm), tol, 30)
        phi2, g2 = _diagonal_gradient(e, trial) if res < tol else (-np.inf, None)
        if phi2 > phi:
            pts, phi, g = trial, phi2, g2
            length = min(2 * length, 0.5)
        else:
            length *= 0.5
    return pts, phi


def solve(e: Embedding, starts: int = 16, seed: int = 42, tol: float = 1e-16,
          distinct_margin: float = 1e-3, y_start_margin: float = 0.05,
          spread_diagonals: bool = True, spread_top: int = 4, max_iter: int = 100) -> SolveReport:
    """Multi-start search for a zero of the test map with four distinct points off Y.

    Certified zeros are ranked by the diagonal sum, then by residual, then
    lexicographically by coordinates.  With ``spread_diagonals`` the
    ``spread_top`` zeros with the largest diagonal sums are first pushed to a
    local maximum of d13 + d24 along the zero set.
    """
    if starts < 1:
        raise ValueError("starts must be >= 1")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    n = e.n
    rejected = 0
    results = []
    for _ in range(starts):
        c, tries = _random_start(rng, n, y_start_margin)
        rejected += tries
        pts, res = gauss_newton(e, c.points, tol, max_iter)
        results.append((pts, res))
    accepted, fallback = [], []
    for pts, res in results:
        c = Config4.normalized(pts)
        if res < tol and distinctness_margin(c) > distinct_margin and distance_to_y(c) > distinct_margin:
            accepted.append(c)
        else:
            fallback.append((res, tuple(pts.ravel()), c))
    converged = len(accepted)
    if spread_diagonals:
        accepted.sort(key=lambda c: (-distances(e, c).phi_diag, tuple(c.points.ravel())))
        for k in range(min(spread_top, len(accepted))):
            sc = Config4.normalized(spread(e, accepted[k].points, tol)[0])
            if distinctness_margin(sc) > distinct_margin and distance_to_y(sc) > distinct_margin:
                accepted[k] = sc
    certified = []
    for c in accepted:
        c = Config4.normalized(gauss_newton(e, c.points, 0.0, 5)[0])  # polish to machine precision
        r = residual_mp(e, c)
        if r < tol:
            certified.append((-round(distances(e, c).phi_diag, 9), r, tuple(c.points.ravel()), c))
        else:
            fallback.append((r, tuple(c.points.ravel()), c))
    notes = []
    if certified:
        certified.sort(key=lambda x: x[:3])
        best = certified[0][3]
    else:
        fallback.sort(key=lambda x: x[:2])
        best = fallback[0][2]
        notes.append("no start met the residual and margin thresholds")
    dist = distances(e, best)
    tau = test_map(e, best).vector()
    r_mp = residual_mp(e, best)
    margins = {"distinct": distinctness_margin(best), "to_Y": distance_to_y(best),
               "distinct_required": distinct_margin, "tol": tol}
    return SolveReport(
        embedding=e.describe(), config=[[float(x) for x in row] for row in best.points],
        distances=dist.d, delta=dist.delta, phi_diag=dist.phi_diag, residual=r_mp,
        residual_float=float(tau @ tau), margins=margins,
        certified=bool(certified) and r_mp < tol and margins["distinct"] > distinct_margin
        and margins["to_Y"] > distinct_margin,
        seed=seed, starts=starts, rejected_starts=rejected, converged_starts=converged,
        runtime=time.perf_counter() - t0, notes=notes)


def square_peg_solve(curve: Embedding, starts: int = 16, seed: int = 42, tol: float = 1e-16,
                     distinct_margin: float = 1e-3) -> SolveReport:
    """The same search for four points on a closed plane curve."""
    if curve.n != 2:
        raise ValueError("square_peg_solve expects a curve (embedding of the unit circle)")
    return solve(curve, starts, seed, tol, distinct_margin)


def side_spread(report: SolveReport) -> float:
    """max |side - mean side| / mean side, together with the diagonal mismatch."""
    d = report.distances
    sides = np.array([d["d12"], d["d23"], d["d34"], d["d14"]])
    diags = np.array([d["d13"], d["d24"]])
    return float(max(np.max(np.abs(sides - sides.mean())) / sides.mean(),
                     np.max(np.abs(diags - diags.mean())) / diags.mean()))
