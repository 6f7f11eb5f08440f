import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ballneedlets.functions import make_function, random_coefficients
from ballneedlets.geometry import WeightedBall
from ballneedlets.needlets import analyze
from ballneedlets.orthopoly import basis_size
from ballneedlets.spaces import (
    B_SPACE,
    F_SPACE,
    MaximalSampler,
    SpaceParams,
    b_norm_kernel,
    b_norm_sequence,
    besov_via_best_approx,
    btau_index,
    btau_norm,
    common_refinement,
    f_norm_kernel,
    f_norm_sequence,
    geodesic_points,
    indicator_bounds,
    littlewood_paley_ratio,
    maximal_function,
)

PARAMS = [SpaceParams(s, rho, p, q, fam) for (s, rho) in ((0, 0), (1, 1)) for p in (1.5, 4.0)
          for q in (1.0, np.inf) for fam in (F_SPACE, B_SPACE)]


def _fhat(frame, rng, degree=4):
    c = random_coefficients(2, degree, rng)
    out = np.zeros(basis_size(2, frame.degree))
    out[: c.size] = c
    return out


def test_param_validation():
    with pytest.raises(ValueError):
        SpaceParams(family="X")
    with pytest.raises(ValueError):
        SpaceParams(p=0)
    with pytest.raises(ValueError):
        SpaceParams(p=np.inf, family=F_SPACE)


def test_refinement_is_exact(frame2):
    ref = common_refinement(frame2)
    assert ref.measures.sum() == pytest.approx(frame2.ball.total_mass, rel=1e-12)
    for j, g in enumerate(frame2.levels):
        per_cell = np.bincount(ref.cell_index[j], weights=ref.measures, minlength=len(g))
        assert np.allclose(per_cell, g.cell_measures, rtol=1e-10)


def test_l2_case_is_parseval(frame2, rng):
    fhat = _fhat(frame2, rng)
    co = analyze(frame2, None, fhat=fhat)
    norm = np.linalg.norm(fhat)
    assert f_norm_sequence(frame2, co, SpaceParams()) == pytest.approx(norm, rel=1e-10)
    assert b_norm_sequence(frame2, co, SpaceParams(family=B_SPACE)) == pytest.approx(norm, rel=1e-10)
    # the squared type (b) cutoffs sum to one, so both kernel norms also reduce to ||f||_2
    assert f_norm_kernel(frame2, fhat=fhat) == pytest.approx(norm, rel=1e-10)
    assert b_norm_kernel(frame2, fhat=fhat) == pytest.approx(norm, rel=1e-10)


@pytest.mark.parametrize("prm", PARAMS, ids=str)
def test_kernel_and_sequence_norms_equivalent(frame2, rng, prm):
    ratios = []
    for _ in range(4):
        fhat = _fhat(frame2, rng)
        co = analyze(frame2, None, fhat=fhat)
        if prm.family == F_SPACE:
            ratios.append(f_norm_kernel(frame2, fhat=fhat, params=prm) / f_norm_sequence(frame2, co, prm))
        else:
            ratios.append(b_norm_kernel(frame2, fhat=fhat, params=prm) / b_norm_sequence(frame2, co, prm))
    assert max(ratios) / min(ratios) < 100


@given(st.floats(-5, 5).filter(lambda t: abs(t) > 1e-3), st.sampled_from(PARAMS))
def test_norms_absolutely_homogeneous(t, prm):
    fr = _small_frame()
    fhat = _fhat(fr, np.random.default_rng(0), 3)
    co = analyze(fr, None, fhat=fhat)
    seq = f_norm_sequence if prm.family == F_SPACE else b_norm_sequence
    assert seq(fr, co.scaled(t), prm) == pytest.approx(abs(t) * seq(fr, co, prm), rel=1e-10)
    ker = f_norm_kernel if prm.family == F_SPACE else b_norm_kernel
    assert ker(fr, fhat=t * fhat, params=prm) == pytest.approx(abs(t) * ker(fr, fhat=fhat, params=prm), rel=1e-10)


@given(st.integers(0, 10_000), st.sampled_from(PARAMS))
def test_q_triangle_inequality(seed, prm):
    fr = _small_frame()
    rng = np.random.default_rng(seed)
    a = analyze(fr, None, fhat=_fhat(fr, rng, 3))
    b = analyze(fr, None, fhat=_fhat(fr, rng, 3))
    seq = f_norm_sequence if prm.family == F_SPACE else b_norm_sequence
    r = min(1.0, prm.p, prm.q)
    assert seq(fr, a + b, prm) ** r <= (seq(fr, a, prm) ** r + seq(fr, b, prm) ** r) * (1 + 1e-12)


_CACHE = {}


def _small_frame():
    from ballneedlets import NeedletFrame

    if "f" not in _CACHE:
        _CACHE["f"] = NeedletFrame.build(2, 1.0, 2)
    return _CACHE["f"]


def test_btau_index():
    assert btau_index(1.0, 2.0, 2) == pytest.approx(1.0)
    assert btau_index(2.0, np.inf, 2) == pytest.approx(1.0)


def test_btau_norm_finite(frame2):
    f = make_function("boundary_power:alpha=1.5", frame2.ball)
    co = analyze(frame2, f)
    assert 0 < btau_norm(frame2, co, 1.0, 2.0) < np.inf


def test_besov_via_best_approx_positive(frame2):
    f = make_function("gaussian_bump", frame2.ball)
    assert besov_via_best_approx(frame2, f, 0.5, 2.0, 2.0) > 0


def test_littlewood_paley_ratio_bounded(frame2):
    f = make_function("random_bandlimited:seed=5,degree=4", frame2.ball)
    for p in (1.5, 2.0, 4.0):
        r = littlewood_paley_ratio(frame2, f, p)
        assert 0.1 < r < 10


def test_maximal_of_constant_is_one():
    ball = WeightedBall(2, 1.0)
    sampler = MaximalSampler.build(ball, n_phi=60)
    assert maximal_function(ball, lambda x: np.ones(len(x)), 1.0, [0.3, 0.2], sampler=sampler) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        maximal_function(ball, lambda x: np.ones(len(x)), 0.0, [0.0, 0.0], sampler=sampler)


def test_maximal_dominates_average():
    ball = WeightedBall(2, 1.0)
    sampler = MaximalSampler.build(ball, n_phi=60)
    assert sampler.weights.sum() == pytest.approx(ball.total_mass, rel=1e-3)
    f = lambda x: x[:, 0] ** 2  # noqa: E731
    avg = sampler.weights @ f(sampler.points) / sampler.weights.sum()
    assert maximal_function(ball, f, 1.0, [0.0, 0.0], sampler=sampler) >= avg * (1 - 1e-12)


def test_indicator_bounds_inside_ball():
    ball = WeightedBall(2, 1.0)
    sampler = MaximalSampler.build(ball, n_phi=80)
    res = indicator_bounds(ball, [0.2, 0.1], 0.3, [0.2, 0.1], 1.0, sampler)
    assert res["M"] == pytest.approx(1.0)
    far = indicator_bounds(ball, [0.2, 0.1], 0.2, [-0.8, 0.0], 1.0, sampler)
    assert 0 < far["M"] < 1
    assert far["lower"] >= far["upper"]


def test_geodesic_endpoints():
    x, y = np.array([0.3, 0.0]), np.array([-0.2, 0.5])
    g = geodesic_points(x, y, 5)
    assert np.allclose(g[0], x) and np.allclose(g[-1], y)
    from ballneedlets.geometry import ball_distance

    steps = ball_distance(g[1:], g[:-1])
    assert np.allclose(steps, steps[0])
