import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ballneedlets.cutoffs import TYPE_A, TYPE_B, make_bump_cutoff
from ballneedlets.geometry import UnsupportedMuError, WeightedBall
from ballneedlets.grids import build_grid
from ballneedlets.kernels import (
    InsufficientQuadratureError,
    band_coeffs,
    convolve,
    eval_Kn,
    eval_Ln,
    eval_Phi_j,
    eval_Pn,
    kernel_eval,
    kernel_matrix,
    localization_constant,
    lowpass_coeffs,
    lp_norm,
    nikolskii_check,
    projection_kernel_spectral,
    u_rule,
)
from ballneedlets.orthopoly import ball_basis, basis_size

from .conftest import ball_points


@pytest.mark.parametrize("d,mu", [(1, 0.5), (1, 1.5), (2, 0.5), (2, 1.0), (2, 2.0)])
def test_gegenbauer_route_matches_spectral(d, mu, rng):
    ball = WeightedBall(d, mu)
    x, y = ball_points(rng, 6, d), ball_points(rng, 5, d)
    for n in (0, 1, 3, 8):
        K = kernel_matrix(ball, np.eye(n + 1)[n], x, y)
        assert np.allclose(K, projection_kernel_spectral(ball, n, x, y), atol=1e-10)


def test_pn_zero_is_constant():
    ball = WeightedBall(2, 1.0)
    val = eval_Pn(ball, 0, [0.3, 0.1], [-0.5, 0.7])
    assert val == pytest.approx(1.0 / ball.total_mass)


@given(st.floats(0.3, 3), st.floats(-0.7, 0.7), st.floats(-0.7, 0.7))
def test_kernels_symmetric(mu, a, b):
    ball = WeightedBall(2, mu)
    x, y = np.array([a, b]), np.array([b * 0.5, -a])
    c = lowpass_coeffs(make_bump_cutoff(TYPE_A), 4)
    assert kernel_eval(ball, c, x, y) == pytest.approx(kernel_eval(ball, c, y, x), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0])
def test_reproducing_property(mu, rng):
    ball = WeightedBall(2, mu)
    n = 6
    g = build_grid(ball, 2)  # exact to 16 >= 2n + n
    coeffs = rng.standard_normal(basis_size(2, n))
    f = ball_basis(ball, n, g.points) @ coeffs
    x = ball_points(rng, 10)
    exact = ball_basis(ball, n, x) @ coeffs
    via_K = convolve(ball, np.ones(n + 1), f, g.points, g.weights, x, exact_degree=g.exact_degree, f_degree=n)
    assert np.allclose(via_K, exact, atol=1e-11)
    a = make_bump_cutoff(TYPE_A)
    via_L = convolve(ball, lowpass_coeffs(a, n), f, g.points, g.weights, x)
    assert np.allclose(via_L, exact, atol=1e-11)


def test_convolve_checks_exactness():
    ball = WeightedBall(2, 1.0)
    g = build_grid(ball, 0)
    with pytest.raises(InsufficientQuadratureError):
        convolve(ball, np.ones(5), np.ones(len(g)), g.points, g.weights, [[0, 0]], exact_degree=4, f_degree=2)


def test_kernel_shortcuts_agree(rng):
    ball = WeightedBall(2, 1.0)
    x, y = ball_points(rng, 4), ball_points(rng, 4)
    assert np.allclose(eval_Kn(ball, 5, x, y), sum(eval_Pn(ball, n, x, y) for n in range(6)))
    a = make_bump_cutoff(TYPE_A)
    assert np.allclose(eval_Ln(ball, a, 4, x, y), kernel_eval(ball, lowpass_coeffs(a, 4), x, y))
    b = make_bump_cutoff(TYPE_B)
    assert np.allclose(eval_Phi_j(ball, b, 0, x, y), 1.0 / ball.total_mass)
    with pytest.raises(ValueError):
        eval_Ln(ball, a, 0, x, y)


def test_band_coefficients_cover_band():
    b = make_bump_cutoff(TYPE_B)
    c = band_coeffs(b, 3)
    assert c.size == 9
    nz = np.nonzero(c)[0]
    assert nz.min() >= 2 and nz.max() <= 7
    with pytest.raises(ValueError):
        band_coeffs(b, -1)


def test_mu_zero_is_rejected():
    with pytest.raises(UnsupportedMuError):
        kernel_eval(WeightedBall(2, 0.0), np.ones(3), [0, 0], [0, 0])


def test_u_rule_must_cover_degree():
    ball = WeightedBall(2, 1.0)
    with pytest.raises(InsufficientQuadratureError):
        kernel_eval(ball, np.ones(20), [0, 0], [0, 0], rule=u_rule(ball, 4))


def test_lowpass_kernel_diagonal_scale():
    # L_n(x, x) W(n; x) / n^d stays within a fixed band from the centre to the boundary
    ball = WeightedBall(2, 1.0)
    a = make_bump_cutoff(TYPE_A)
    from ballneedlets.geometry import weight_W

    r = np.array([0.0, 0.5, 0.9, 0.99, 1.0])
    x = np.column_stack([r, 0 * r])
    for n in (8, 16, 32):
        v = kernel_eval(ball, lowpass_coeffs(a, n), x, x) * weight_W(ball, n, x) / n**2
        assert v.max() / v.min() < 10


def test_localization_constant_positive(rng):
    ball = WeightedBall(2, 1.0)
    c = localization_constant(ball, make_bump_cutoff(TYPE_A), 8, 6, ball_points(rng, 20), ball_points(rng, 20))
    assert 0 < c < np.inf


def test_lp_norm():
    w = np.array([0.5, 0.5])
    assert lp_norm([3.0, -4.0], w, np.inf) == 4.0
    assert lp_norm([1.0, 1.0], w, 2) == pytest.approx(1.0)


def test_nikolskii_identity_case(rng):
    ball = WeightedBall(2, 1.0)
    g = build_grid(ball, 2)
    vals = ball_basis(ball, 4, g.points) @ rng.standard_normal(15)
    assert nikolskii_check(ball, 4, vals, g.weights, 2, 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        nikolskii_check(ball, 4, vals, g.weights, 1, 2)
