"""Weighted Triebel-Lizorkin and Besov norms, kernel side and sequence side.

Kernel norms act on the level blocks ``Phi_j * f`` (``j = 0..J``) sampled on
the frame's analysis cubature.  Sequence norms act on needlet coefficients;
the Triebel-Lizorkin one is evaluated exactly on the common refinement of all
level partitions, where its integrand is piecewise constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import WeightedBall, as_points, ball_distance, weight_W
from .grids import cell_measures
from .kernels import lp_norm
from .needlets import CoefficientSet, NeedletFrame, needlet_values
from .orthopoly import ball_basis, basis_degrees

F_SPACE = "F"
B_SPACE = "B"


@dataclass(frozen=True)
class SpaceParams:
    """Smoothness ``s``, boundary parameter ``rho``, integrability ``p`` and summability ``q``."""

    s: float = 0.0
    rho: float = 0.0
    p: float = 2.0
    q: float = 2.0
    family: str = F_SPACE

    def __post_init__(self):
        if self.family not in (F_SPACE, B_SPACE):
            raise ValueError("family must be 'F' or 'B'")
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be positive")
        if self.family == F_SPACE and np.isinf(self.p):
            raise ValueError("Triebel-Lizorkin norms need p < infinity")


def _lq(stack: np.ndarray, q: float, axis: int = 0) -> np.ndarray:
    if np.isinf(q):
        return np.max(stack, axis=axis)
    return np.sum(stack**q, axis=axis) ** (1.0 / q)


def level_blocks(frame: NeedletFrame, f=None, fhat=None, pair=None) -> np.ndarray:
    """``Phi_j * f`` on the analysis nodes, shape ``(J + 1, npts)``.

    ``pair`` overrides the frame's cutoff pair (used for cutoff-independence checks).
    """
    if fhat is None:
        fhat = frame.spectral_coefficients(f)
    cut = (pair or frame.pair).a_hat
    deg = basis_degrees(frame.ball.d, frame.degree)
    mult = np.zeros((frame.J + 1, deg.size), dtype=complex if not cut.is_real else float)
    mult[0, deg == 0] = 1.0
    for j in range(1, frame.J + 1):
        mult[j] = cut(deg / 2.0 ** (j - 1))
    spec = mult * fhat[None, : deg.size]
    g = frame.analysis_grid
    out = np.empty((frame.J + 1, len(g)), dtype=spec.dtype)
    for s in range(0, len(g), 16384):
        Q = ball_basis(frame.ball, frame.degree, g.points[s : s + 16384])
        out[:, s : s + 16384] = spec @ Q.T
    return out


def _level_weights(frame: NeedletFrame, params: SpaceParams, points) -> np.ndarray:
    ball = frame.ball
    return np.stack([2.0 ** (params.s * j) * weight_W(ball, 2.0**j, points) ** (-params.rho / ball.d)
                     for j in range(frame.J + 1)])


def f_norm_kernel(frame: NeedletFrame, f=None, params: SpaceParams = SpaceParams(), fhat=None, pair=None) -> float:
    """``|| (sum_j (2^(sj) W(2^j;.)^(-rho/d) |Phi_j * f|)^q)^(1/q) ||_p`` with levels ``0..J``."""
    g = frame.analysis_grid
    blocks = np.abs(level_blocks(frame, f, fhat, pair)) * _level_weights(frame, params, g.points)
    return lp_norm(_lq(blocks, params.q), g.weights, params.p)


def b_norm_kernel(frame: NeedletFrame, f=None, params: SpaceParams = SpaceParams(family=B_SPACE), fhat=None,
                  pair=None) -> float:
    """``(sum_j (2^(sj) || W(2^j;.)^(-rho/d) Phi_j * f ||_p)^q)^(1/q)`` with levels ``0..J``."""
    g = frame.analysis_grid
    blocks = np.abs(level_blocks(frame, f, fhat, pair)) * _level_weights(frame, params, g.points)
    per_level = np.array([lp_norm(b, g.weights, params.p) for b in blocks])
    return float(_lq(per_level, params.q))


# -- sequence side -------------------------------------------------------------------
@dataclass(frozen=True)
class Refinement:
    """Common refinement of the level partitions: piece measures and the cell of each level."""

    measures: np.ndarray
    cell_index: np.ndarray  # (J + 1, pieces)


def _unique_edges(arrays, tol=1e-13) -> np.ndarray:
    e = np.sort(np.concatenate(arrays))
    keep = np.concatenate([[True], np.diff(e) > tol])
    return e[keep]


def common_refinement(frame: NeedletFrame) -> Refinement:
    cached = getattr(frame, "_refinement", None)
    if cached is not None:
        return cached
    ball, grids = frame.ball, frame.levels
    edges = _unique_edges([g.phi_edges for g in grids])
    mids = 0.5 * (edges[:-1] + edges[1:])
    rings = [np.clip(np.searchsorted(g.phi_edges, mids, side="right") - 1, 0, len(g.ring_counts) - 1) for g in grids]
    if ball.d == 1:
        cells = np.column_stack([np.sin(edges[:-1]), np.sin(edges[1:])])
        ref = Refinement(cell_measures(ball, cells), np.stack(rings))
    else:
        meas, idx = [], []
        two_pi = 2 * np.pi
        for k in range(mids.size):
            breaks = []
            for g, ring in zip(grids, rings):
                i = ring[k]
                n = g.ring_counts[i]
                breaks.append(np.mod(g.ring_offsets[i] + two_pi * np.arange(n) / n, two_pi))
            b = _unique_edges(breaks)
            lo = b
            hi = np.concatenate([b[1:], [b[0] + two_pi]])
            mid_th = 0.5 * (lo + hi)
            r0, r1 = np.sin(edges[k]), np.sin(edges[k + 1])
            cells = np.column_stack([np.full(lo.size, r0), np.full(lo.size, r1), lo, hi])
            meas.append(cell_measures(ball, cells))
            cols = []
            for g, ring in zip(grids, rings):
                i = ring[k]
                n = g.ring_counts[i]
                sector = np.floor(np.mod(mid_th - g.ring_offsets[i], two_pi) / (two_pi / n)).astype(int) % n
                cols.append(g.ring_start[i] + sector)
            idx.append(np.stack(cols))
        ref = Refinement(np.concatenate(meas), np.concatenate(idx, axis=1))
    object.__setattr__(frame, "_refinement", ref)
    return ref


def _check_frame(frame: NeedletFrame, coeffs: CoefficientSet):
    from .needlets import FrameMismatchError

    if coeffs.frame_hash != frame.frame_hash:
        raise FrameMismatchError("coefficients belong to a different frame")


def f_norm_sequence(frame: NeedletFrame, coeffs: CoefficientSet, params: SpaceParams = SpaceParams()) -> float:
    """``|| (sum_j 2^(sjq) sum_xi (|h_xi| W(2^j;xi)^(-rho/d) m(R_xi)^(-1/2) 1_{R_xi})^q)^(1/q) ||_p``, exactly."""
    _check_frame(frame, coeffs)
    ref = common_refinement(frame)
    ball = frame.ball
    rows = []
    for j, (g, h) in enumerate(zip(frame.levels, coeffs.levels)):
        cell = (2.0 ** (params.s * j) * np.abs(h) * weight_W(ball, 2.0**j, g.points) ** (-params.rho / ball.d)
                / np.sqrt(g.cell_measures))
        rows.append(cell[ref.cell_index[j]])
    return lp_norm(_lq(np.stack(rows), params.q), ref.measures, params.p)


def b_norm_sequence(frame: NeedletFrame, coeffs: CoefficientSet, params: SpaceParams = SpaceParams(family=B_SPACE)) -> float:
    """``(sum_j 2^(j(s - d/p + d/2) q) [sum_xi (W(2^j;xi)^(-rho/d + 1/p - 1/2) |h_xi|)^p]^(q/p))^(1/q)``."""
    _check_frame(frame, coeffs)
    ball, d = frame.ball, frame.ball.d
    inv_p = 0.0 if np.isinf(params.p) else 1.0 / params.p
    per_level = []
    for j, (g, h) in enumerate(zip(frame.levels, coeffs.levels)):
        terms = weight_W(ball, 2.0**j, g.points) ** (-params.rho / d + inv_p - 0.5) * np.abs(h)
        inner = np.max(terms) if np.isinf(params.p) else np.sum(terms**params.p) ** inv_p
        per_level.append(2.0 ** (j * (params.s - d * inv_p + d / 2)) * inner)
    return float(_lq(np.array(per_level), params.q))


def btau_index(s: float, p: float, d: int) -> float:
    """``tau`` with ``1/tau = s/d + 1/p``."""
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    return 1.0 / (s / d + inv_p)


def btau_norm(frame: NeedletFrame, coeffs: CoefficientSet, s: float, p: float) -> float:
    """The ``B_tau^s`` sequence norm (``rho = s``, ``q = tau``) used by the Jackson estimate."""
    tau = btau_index(s, p, frame.ball.d)
    return b_norm_sequence(frame, coeffs, SpaceParams(s=s, rho=s, p=tau, q=tau, family=B_SPACE))


def btau_term_norm(frame: NeedletFrame, coeffs: CoefficientSet, s: float, p: float, term_norms) -> float:
    """``(sum_xi ||<f,psi_xi> psi_xi||_p^tau)^(1/tau)`` given per-level ``||psi_xi||_p``."""
    tau = btau_index(s, p, frame.ball.d)
    total = sum(np.sum((np.abs(h) * nrm) ** tau) for h, nrm in zip(coeffs.levels, term_norms))
    return float(total ** (1.0 / tau))


def besov_via_best_approx(frame: NeedletFrame, f, s: float, p: float, q: float, levels: int | None = None) -> float:
    """``||f||_p + (sum_j (2^(sj) ||f - L_{2^j} * f||_p)^q)^(1/q)`` over ``j = 0..levels``."""
    from .approx import best_poly_error

    levels = frame.J - 1 if levels is None else levels
    vals = frame.sample(f)
    g = frame.analysis_grid
    terms = np.array([2.0 ** (s * j) * best_poly_error(frame, vals, 2**j, p) for j in range(levels + 1)])
    return lp_norm(vals, g.weights, p) + float(_lq(terms, q))


def square_function(frame: NeedletFrame, coeffs: CoefficientSet, points=None) -> np.ndarray:
    """``(sum_j sum_xi (|<f,phi_xi>| |psi_xi(x)|)^2)^(1/2)`` at ``points`` (default: analysis nodes)."""
    _check_frame(frame, coeffs)
    points = frame.analysis_grid.points if points is None else np.atleast_2d(points)
    acc = np.zeros(points.shape[0])
    for j, h in enumerate(coeffs.levels):
        idx = np.arange(h.size)
        for s in range(0, points.shape[0], 4096):
            vals = needlet_values(frame, j, idx, points[s : s + 4096], which="synthesis")
            acc[s : s + 4096] += (np.abs(vals) ** 2) @ (np.abs(h) ** 2)
    return np.sqrt(acc)


def littlewood_paley_ratio(frame: NeedletFrame, f, p: float) -> float:
    """``||f||_p`` divided by the ``L_p`` norm of the needlet square function."""
    from .needlets import analyze

    vals = frame.sample(f)
    g = frame.analysis_grid
    sq = square_function(frame, analyze(frame, vals))
    return lp_norm(vals, g.weights, p) / lp_norm(sq, g.weights, p)


# -- maximal operator ----------------------------------------------------------------
@dataclass(frozen=True)
class MaximalSampler:
    """Midpoint rule on a uniform grid in hemisphere angles, used for ball averages."""

    ball: WeightedBall
    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, ball: WeightedBall, n_phi: int = 400) -> "MaximalSampler":
        mu = ball.mu
        if ball.d == 1:
            step = np.pi / n_phi
            phi = -np.pi / 2 + step * (np.arange(n_phi) + 0.5)
            return cls(ball, np.sin(phi)[:, None], step * np.cos(phi) ** (2 * mu))
        if ball.d != 2:
            raise ValueError("the maximal operator sampler supports d in {1, 2}")
        step = (np.pi / 2) / n_phi
        phi = step * (np.arange(n_phi) + 0.5)
        n_th = 4 * n_phi
        th = 2 * np.pi * (np.arange(n_th) + 0.5) / n_th
        P, T = np.meshgrid(phi, th, indexing="ij")
        r = np.sin(P)
        pts = np.stack([r * np.cos(T), r * np.sin(T)], axis=-1).reshape(-1, 2)
        w = (step * (2 * np.pi / n_th) * np.sin(P) * np.cos(P) ** (2 * mu)).ravel()
        return cls(ball, pts, w)


def geodesic_points(x, y, count: int) -> np.ndarray:
    """``count`` points on the intrinsic geodesic from ``x`` to ``y`` (endpoints included)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    lx = np.append(x, np.sqrt(max(0.0, 1 - x @ x)))
    ly = np.append(y, np.sqrt(max(0.0, 1 - y @ y)))
    om = np.arccos(np.clip(lx @ ly, -1.0, 1.0))
    t = np.linspace(0.0, 1.0, count)
    if om < 1e-12:
        return np.repeat(x[None, :], count, axis=0)
    lifted = (np.sin((1 - t) * om)[:, None] * lx + np.sin(t * om)[:, None] * ly) / np.sin(om)
    return lifted[:, :-1]


def maximal_function(ball: WeightedBall, f, t: float, x, centers=None, radii=None,
                     sampler: MaximalSampler | None = None) -> float:
    """Lower-bound surrogate of ``M_t f(x) = sup_{B ni x} (m(B)^-1 int_B |f|^t w)^(1/t)``.

    The supremum runs over balls ``B_c(r)`` with ``c`` in ``centers`` (default: ``x`` and a
    coarse grid) and ``r`` in ``radii`` (default: dyadic radii) or ``r`` just above ``d(c, x)``,
    so every tested ball contains ``x``.  ``f`` is a callable or values on the sampler.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    sampler = sampler or MaximalSampler.build(ball)
    x = as_points(x, ball.d).reshape(ball.d)
    vals = np.abs(f(sampler.points) if callable(f) else np.asarray(f)) ** t
    if centers is None:
        from .grids import build_grid

        centers = np.vstack([x[None, :], build_grid(ball, 1).points])
    radii = 2.0 ** -np.arange(0, 8) * np.pi / 2 if radii is None else np.asarray(radii)
    best = 0.0
    for c in np.atleast_2d(centers):
        dist = ball_distance(sampler.points, c)
        dcx = float(ball_distance(x, c))
        cand = np.concatenate([radii[radii > dcx], [dcx * (1 + 1e-9) + 1e-12]])
        for r in cand:
            m = dist < r
            mass = sampler.weights[m].sum()
            if mass > 0:
                best = max(best, float(sampler.weights[m] @ vals[m]) / mass)
    return best ** (1.0 / t)


def indicator_bounds(ball: WeightedBall, xi, r: float, x, t: float, sampler: MaximalSampler | None = None) -> dict:
    """``M_t 1_{B_xi(r)}(x)`` with the two profile ratios of the indicator estimate.

    ``lower = M / (1 + d/r)^(-(2 mu + d)/t)`` and ``upper = M / (1 + d/r)^(-d/t)``.
    """
    sampler = sampler or MaximalSampler.build(ball)
    xi = np.asarray(xi, float)
    ind = (ball_distance(sampler.points, xi) < r).astype(float)
    centers = np.vstack([geodesic_points(x, xi, 17), np.asarray(x, float)[None, :]])
    radii = np.array([r, 2 * r, 4 * r, 8 * r])
    M = maximal_function(ball, ind, t, x, centers=centers, radii=radii, sampler=sampler)
    rel = 1.0 + float(ball_distance(x, xi)) / r
    return {
        "M": M,
        "lower": M / rel ** (-(2 * ball.mu + ball.d) / t),
        "upper": M / rel ** (-ball.d / t),
    }
