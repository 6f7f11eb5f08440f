import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from ballneedlets.geometry import (
    DivergentWeightError,
    UnsupportedMuError,
    WeightedBall,
    as_points,
    ball_distance,
    ball_measure,
    lift,
    norm_dist_bound_check,
    pairwise_distance,
    weight_w,
    weight_W,
)

coord = st.floats(-1, 1, allow_nan=False)


def _pt(a, b):
    v = np.array([a, b])
    n = np.linalg.norm(v)
    return v / n if n > 1 else v


@pytest.mark.parametrize("mu", [0.25, 0.5, 1.0, 2.0])
def test_total_mass_matches_quadrature(mu):
    ball = WeightedBall(2, mu)
    val, _ = integrate.quad(lambda r: 2 * np.pi * r * (1 - r * r) ** (mu - 0.5), 0, 1)
    assert ball.total_mass == pytest.approx(val, rel=1e-9)
    b1 = WeightedBall(1, mu)
    val1, _ = integrate.quad(lambda x: (1 - x * x) ** (mu - 0.5), -1, 1)
    assert b1.total_mass == pytest.approx(val1, rel=1e-9)


def test_mu_one_disk_mass_is_two_pi_over_three():
    assert WeightedBall(2, 1.0).total_mass == pytest.approx(2 * np.pi / 3, rel=1e-14)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        WeightedBall(2, -0.1)
    with pytest.raises(ValueError):
        WeightedBall(0, 1.0)
    with pytest.raises(UnsupportedMuError):
        WeightedBall(2, 0.0).require_kernel_support()
    with pytest.raises(ValueError):
        as_points([[0.9, 0.9]])


def test_distance_known_values():
    assert ball_distance([0.0, 0.0], [0.0, 0.0]) == pytest.approx(0.0)
    # centre to the boundary sphere is a quarter turn on the lifted hemisphere
    assert ball_distance([0.0, 0.0], [1.0, 0.0]) == pytest.approx(np.pi / 2)
    assert ball_distance([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(np.pi)


@given(coord, coord, coord, coord, coord, coord)
def test_distance_is_a_metric(a, b, c, d, e, f):
    x, y, z = _pt(a, b), _pt(c, d), _pt(e, f)
    dxy, dyx = ball_distance(x, y), ball_distance(y, x)
    assert dxy == pytest.approx(dyx, abs=1e-12)
    assert 0 <= dxy <= np.pi + 1e-12
    assert dxy <= ball_distance(x, z) + ball_distance(z, y) + 1e-12


@given(coord, coord, coord, coord)
def test_distance_is_geodesic_of_lift(a, b, c, d):
    x, y = _pt(a, b), _pt(c, d)
    lx, ly = lift(x), lift(y)
    assert np.linalg.norm(lx) == pytest.approx(1.0)
    assert np.cos(ball_distance(x, y)) == pytest.approx(np.clip(lx @ ly, -1, 1), abs=1e-12)
    assert norm_dist_bound_check(x, y)


def test_pairwise_matches_elementwise(rng):
    x = rng.uniform(-0.7, 0.7, (5, 2))
    y = rng.uniform(-0.7, 0.7, (4, 2))
    D = pairwise_distance(x, y)
    assert np.allclose(D, ball_distance(x[:, None], y[None, :]))


def test_weights():
    ball = WeightedBall(2, 2.0)
    x = np.array([[0.0, 0.0], [0.6, 0.0], [1.0, 0.0]])
    assert np.allclose(weight_w(ball, x), [1.0, 0.64**1.5, 0.0])
    assert np.allclose(weight_W(ball, 4, x), (np.array([1.0, 0.8, 0.0]) + 0.25) ** 4)
    with pytest.raises(DivergentWeightError):
        weight_w(WeightedBall(2, 0.25), [[1.0, 0.0]])
    with pytest.raises(ValueError):
        weight_W(ball, 0.5, x)


@given(st.floats(0.01, 0.99), st.floats(1, 64))
def test_W_monotone_in_n_and_gap(r, n):
    ball = WeightedBall(2, 1.0)
    x = np.array([[r, 0.0]])
    assert weight_W(ball, 2 * n, x)[0] <= weight_W(ball, n, x)[0]
    assert weight_W(ball, n, [[r * 0.5, 0.0]])[0] >= weight_W(ball, n, x)[0]


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("mu", [0.5, 1.5])
def test_ball_measure_whole_ball(d, mu):
    ball = WeightedBall(d, mu)
    assert ball_measure(ball, np.zeros(d), np.pi) == pytest.approx(ball.total_mass, rel=1e-8)


def test_ball_measure_matches_monte_carlo(rng):
    ball = WeightedBall(2, 1.0)
    c, r = np.array([0.5, 0.2]), 0.4
    pts = rng.uniform(-1, 1, (400000, 2))
    pts = pts[np.sum(pts**2, axis=1) < 1]
    inside = ball_distance(pts, c) < r
    mc = 4.0 * np.sum(weight_w(ball, pts) * inside) / 400000
    assert ball_measure(ball, c, r) == pytest.approx(mc, rel=0.02)


@given(coord, coord, coord, coord, st.integers(1, 256), st.sampled_from([0.5, 1.0, 2.0]))
def test_W_doubling_bound(a, b, c, d, n, mu):
    ball = WeightedBall(2, mu)
    x, y = _pt(a, b), _pt(c, d)
    lhs = weight_W(ball, n, x)
    rhs = 2**mu * weight_W(ball, n, y) * (1 + n * ball_distance(x, y)) ** (2 * mu)
    assert lhs <= rhs * (1 + 1e-12)


def test_nearby_points_distance_is_accurate():
    x = np.array([0.3, 0.4])
    y = x + np.array([1e-9, 0.0])
    # first-order expansion of the lifted chord
    gx = np.sqrt(1 - x @ x)
    dg = -x[0] * 1e-9 / gx
    assert ball_distance(x, y) == pytest.approx(np.hypot(1e-9, dg), rel=1e-6)
    assert ball_distance(x, x) == 0.0


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_ball_measure_scaling_band(mu):
    ball = WeightedBall(2, mu)
    ratios = []
    for rad in (0.0, 0.5, 0.9, 0.99, 1.0):
        for r in np.geomspace(0.01, 0.5, 6):
            xi = np.array([rad, 0.0])
            m = ball_measure(ball, xi, r)
            ratios.append(m / (r**2 * (r + np.sqrt(1 - rad * rad)) ** (2 * mu)))
    assert max(ratios) / min(ratios) <= 20
