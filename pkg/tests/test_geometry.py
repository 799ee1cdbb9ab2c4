import json
import math

import numpy as np
import pytest

from d8tetra import geometry as geo


def _random_config(rng, n=3):
    return geo.Config4.normalized(rng.normal(size=(4, n)))


# -- harmonics and polynomials ---------------------------------------------------------

def _scipy_real_harmonic(l, m, polar, azim):
    special = pytest.importorskip("scipy.special")
    if hasattr(special, "sph_harm_y"):
        y = special.sph_harm_y(l, abs(m), polar, azim)
    else:
        y = special.sph_harm(abs(m), l, azim, polar)
    if m == 0:
        return y.real
    sign = (-1) ** m
    return math.sqrt(2) * sign * (y.real if m > 0 else y.imag)


@pytest.mark.parametrize("l", [0, 1, 2, 3])
def test_real_harmonics_match_scipy(l, rng):
    pts = rng.normal(size=(50, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    polar = np.arccos(np.clip(pts[:, 2], -1, 1))
    azim = np.arctan2(pts[:, 1], pts[:, 0])
    for m in range(-l, l + 1):
        ours = geo.real_harmonic(l, m)(pts)
        ref = _scipy_real_harmonic(l, m, polar, azim)
        assert np.allclose(ours, ref, atol=1e-12), (l, m)


def test_harmonic_bounds():
    with pytest.raises(ValueError):
        geo.real_harmonic(4, 0)


def test_poly_gradient_matches_finite_differences(rng):
    poly = geo.real_harmonic(3, 1)
    x = rng.normal(size=(5, 3))
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (poly(x + e) - poly(x - e)) / (2 * h)
        assert np.allclose(poly.grad(x)[:, k], fd, atol=1e-7)


def test_cos_multiple():
    t = np.linspace(0, 2 * np.pi, 13)
    pts = np.stack([np.cos(t), np.sin(t)], axis=1)
    assert np.allclose(geo.cos_multiple(5)(pts), np.cos(5 * t))


# -- embeddings -----------------------------------------------------------------------

def test_parse_embedding():
    assert isinstance(geo.parse_embedding("round:2"), geo.Linear)
    e = geo.parse_embedding("ellipsoid:1,1.3,0.7")
    assert np.allclose(e.scales, [1, 1.3, 0.7])
    h = geo.parse_embedding("harmonic:l2m1=0.15,l3m2=0.1")
    assert isinstance(h, geo.Radial) and h.n == 3
    assert geo.parse_embedding("star:0.2,5").n == 2
    assert geo.parse_embedding("ellipse:1,0.6").n == 2
    with pytest.raises(ValueError):
        geo.parse_embedding("torus:1")


def test_non_injective_specs_are_rejected():
    with pytest.raises(geo.NonInjectiveSpec):
        geo.radial_harmonic({(2, 0): 5.0})
    with pytest.raises(geo.NonInjectiveSpec):
        geo.ellipsoid(1, 0, 1)
    with pytest.raises(geo.NonInjectiveSpec):
        geo.star(1.5, 3)


def test_differential_matches_finite_differences(rng):
    e = geo.radial_harmonic({(2, 1): 0.15, (3, 2): 0.1})
    p = rng.normal(size=(3, 3))
    jac = e.differential(p)
    h = 1e-6
    for k in range(3):
        d = np.zeros(3)
        d[k] = h
        fd = (e.evaluate(p + d) - e.evaluate(p - d)) / (2 * h)
        assert np.allclose(jac[:, :, k], fd, atol=1e-7)


def test_lp_metric_is_a_metric(rng):
    pts = rng.normal(size=(20, 3))
    assert geo.check_metric(geo.lp_metric(3), pts) == []


# -- configurations and symmetry ------------------------------------------------------

def test_config_validation():
    with pytest.raises(ValueError):
        geo.Config4(np.ones((4, 3)))
    with pytest.raises(ValueError):
        geo.Config4(np.eye(3))


def test_group_acts_faithfully(rng):
    c = _random_config(rng)
    images = [geo.act(g, c).points for g in geo.D8_ELEMENTS]
    for i in range(8):
        for j in range(i + 1, 8):
            assert not np.allclose(images[i], images[j])


def test_group_relations(rng):
    c = _random_config(rng)
    assert np.allclose(geo.act("wwww", c).points, c.points)
    assert np.allclose(geo.act("jj", c).points, c.points)
    # j w j = w^-1
    assert np.allclose(geo.act("jwj", c).points, geo.act("www", c).points)


def test_test_map_equivariance(rng):
    e = geo.ellipsoid(1.0, 1.3, 0.7)
    for _ in range(50):
        c = _random_config(rng)
        base = geo.test_map(e, c)
        for g in geo.D8_ELEMENTS:
            moved = geo.test_map(e, geo.act(g, c))
            t, s = geo.rho(g, base.t, base.s)
            assert np.allclose(moved.t, t, atol=1e-12) and np.allclose(moved.s, s, atol=1e-12)


def test_test_map_sums_to_zero(rng):
    v = geo.test_map(geo.round_sphere(), _random_config(rng))
    assert abs(v.t.sum()) < 1e-12 and abs(v.s.sum()) < 1e-12


def test_square_on_the_equator_is_a_zero():
    c = geo.Config4.from_angles([0, np.pi / 2, np.pi, 3 * np.pi / 2])
    pts = np.concatenate([c.points, np.zeros((4, 1))], axis=1)
    v = geo.test_map(geo.round_sphere(), geo.Config4(pts))
    assert v.norm2 < 1e-28


def test_retraction_stays_on_spheres(rng):
    c = _random_config(rng)
    moved = geo.retract(c.points, rng.normal(size=8))
    assert np.allclose(np.linalg.norm(moved, axis=1), 1)


@pytest.mark.parametrize("spec", ["round:1", "ellipsoid:1,1.3,0.7", "harmonic:l2m1=0.15", "ellipse:1,0.6",
                                  "star:0.2,5"])
def test_gradient(spec, rng):
    e = geo.parse_embedding(spec)
    for _ in range(10):
        c = _random_config(rng, e.n)
        _, g = geo.residual_and_gradient(e, c)
        num = geo.numeric_gradient(e, c)
        assert np.linalg.norm(g - num) <= 1e-6 * np.linalg.norm(g)


def test_margins():
    c = geo.Config4(np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], dtype=float))
    assert geo.distinctness_margin(c) == pytest.approx(np.pi / 2)
    assert geo.distance_to_y(c) == pytest.approx(np.pi)
    on_y = geo.Config4(np.array([[1, 0, 0], [0, 1, 0], [1, 0, 0], [0, 1, 0]], dtype=float))
    assert geo.distance_to_y(on_y) == 0


# -- solver -----------------------------------------------------------------------------

def test_round_sphere_solution_is_a_square():
    rep = geo.solve(geo.round_sphere(2.0), starts=8, seed=1)
    assert rep.certified
    for k in ("d12", "d23", "d34", "d14"):
        assert rep.distances[k] == pytest.approx(2 * math.sqrt(2), rel=1e-8)


def test_solver_is_deterministic():
    a = geo.solve(geo.ellipsoid(1.0, 1.3, 0.7), starts=4, seed=3)
    b = geo.solve(geo.ellipsoid(1.0, 1.3, 0.7), starts=4, seed=3)
    assert a.config == b.config


def test_report_json_round_trip():
    rep = geo.solve(geo.round_sphere(), starts=2, seed=0)
    data = json.loads(rep.to_json())
    for key in ("config", "distances", "delta", "phi_diag", "residual", "margins", "certified", "seed", "starts"):
        assert key in data
    assert data["seed"] == 0


def test_square_peg_on_ellipse():
    rep = geo.square_peg_solve(geo.ellipse(1.0, 0.6), starts=8, seed=42)
    assert rep.certified and rep.residual < 1e-20
    assert geo.side_spread(rep) < 1e-8
    with pytest.raises(ValueError):
        geo.square_peg_solve(geo.round_sphere())


def test_solver_rejects_zero_starts():
    with pytest.raises(ValueError):
        geo.solve(geo.round_sphere(), starts=0)


def test_ellipse_square_matches_closed_form():
    # the inscribed square of x^2/a^2 + y^2/b^2 = 1 has vertices (+-t, +-t), t = ab / sqrt(a^2 + b^2)
    a, b = 1.0, 0.6
    rep = geo.square_peg_solve(geo.ellipse(a, b), starts=16, seed=42)
    side = 2 * a * b / math.sqrt(a * a + b * b)
    for k in ("d12", "d23", "d34", "d14"):
        assert rep.distances[k] == pytest.approx(side, rel=1e-10)
    assert rep.distances["d13"] == pytest.approx(side * math.sqrt(2), rel=1e-10)
