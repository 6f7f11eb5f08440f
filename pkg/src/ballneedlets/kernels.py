"""Projection kernels ``P_n``, smoothed kernels ``L_n`` and level kernels ``Phi_j``.

Kernels are evaluated from the Gegenbauer integral representation

    P_n(x, y) = b_d b_1 (n + lam) / lam * int C_n^lam(<x,y> + u sx sy) (1-u^2)^(mu-1) du,

with ``sx = sqrt(1 - |x|^2)``, the ``u``-integral done by an exact
Gauss-Jacobi rule.  Any kernel ``sum_nu c_nu P_nu`` shares one Gegenbauer
recurrence per quadrature node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cutoffs import Cutoff, eval_cutoff
from .geometry import (
    WeightedBall,
    ball_distance,
    boundary_gap,
    pairwise_distance,
    weight_W,
)
from .orthopoly import (
    QuadratureRule,
    ball_basis,
    basis_degrees,
    gauss_jacobi_rule,
    gegenbauer_weighted_sum,
)

_CHUNK = 2_000_000


class InsufficientQuadratureError(ValueError):
    """The supplied cubature cannot integrate the requested product exactly."""


@dataclass(frozen=True)
class KernelConfig:
    """Ball, cutoff and the ``u``-rule needed to evaluate kernels up to ``degree_cap``."""

    ball: WeightedBall
    cutoff: Cutoff | None
    degree_cap: int
    quad: QuadratureRule

    @classmethod
    def build(cls, ball: WeightedBall, degree_cap: int, cutoff: Cutoff | None = None) -> "KernelConfig":
        ball.require_kernel_support()
        return cls(ball, cutoff, degree_cap, u_rule(ball, degree_cap))


def u_rule(ball: WeightedBall, degree: int) -> QuadratureRule:
    """Gauss-Jacobi rule exact for the degree-``degree`` ``u``-integrand."""
    ball.require_kernel_support()
    return gauss_jacobi_rule(ball.mu, max(1, (degree + 2) // 2))


def lowpass_coeffs(cutoff: Cutoff, n: int) -> np.ndarray:
    """Spectral multipliers ``a(nu / n)``, ``nu = 0..2n``, of ``L_n``."""
    return eval_cutoff(cutoff, np.arange(2 * n + 1) / n)


def band_coeffs(cutoff: Cutoff, j: int) -> np.ndarray:
    """Spectral multipliers of the level-``j`` kernel ``Phi_j``.

    Level 0 is the projection onto constants (multiplier 1 at ``nu = 0``).
    """
    if j < 0:
        raise ValueError("level must be >= 0")
    if j == 0:
        return np.ones(1)
    return eval_cutoff(cutoff, np.arange(2**j + 1) / 2.0 ** (j - 1))


def _kernel_from_inner(ball: WeightedBall, coeffs, inner, sx_sy, rule: QuadratureRule):
    # inner, sx_sy: arrays of the same shape
    lam = ball.lam
    coeffs = np.asarray(coeffs)
    nu = np.arange(coeffs.size)
    scaled = coeffs * (nu + lam) / lam
    out = np.zeros(inner.shape, dtype=np.result_type(coeffs, float))
    for u, w in zip(rule.nodes, rule.weights):
        t = np.clip(inner + u * sx_sy, -1.0, 1.0)
        out += w * gegenbauer_weighted_sum(lam, scaled, t)
    return ball.b_d_mu * ball.b_1_half * out


def kernel_eval(ball: WeightedBall, coeffs, x, y, rule: QuadratureRule | None = None):
    """``sum_nu coeffs[nu] P_nu(x, y)`` with broadcasting over the leading axes of ``x`` and ``y``."""
    ball.require_kernel_support()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    coeffs = np.atleast_1d(np.asarray(coeffs))
    rule = rule or u_rule(ball, coeffs.size - 1)
    if rule.exact_degree < coeffs.size - 1:
        raise InsufficientQuadratureError("u-rule is not exact for the kernel degree")
    inner = np.sum(x * y, axis=-1)
    sxy = boundary_gap(x) * boundary_gap(y)
    inner, sxy = np.broadcast_arrays(inner, sxy)
    return _kernel_from_inner(ball, coeffs, inner, sxy, rule)


def kernel_matrix(ball: WeightedBall, coeffs, x, y, rule: QuadratureRule | None = None):
    """Matrix ``K[i, k] = sum_nu coeffs[nu] P_nu(x_i, y_k)``."""
    ball.require_kernel_support()
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    coeffs = np.atleast_1d(np.asarray(coeffs))
    rule = rule or u_rule(ball, coeffs.size - 1)
    if rule.exact_degree < coeffs.size - 1:
        raise InsufficientQuadratureError("u-rule is not exact for the kernel degree")
    sx, sy = boundary_gap(x), boundary_gap(y)
    out = np.empty((x.shape[0], y.shape[0]), dtype=np.result_type(coeffs, float))
    rows = max(1, _CHUNK // max(1, y.shape[0]))
    for i in range(0, x.shape[0], rows):
        xs = x[i : i + rows]
        inner = xs @ y.T
        out[i : i + rows] = _kernel_from_inner(ball, coeffs, inner, np.outer(sx[i : i + rows], sy), rule)
    return out


def eval_Pn(ball: WeightedBall, n: int, x, y):
    """Reproducing kernel of the degree-``n`` orthogonal component ``V_n``."""
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    return kernel_eval(ball, coeffs, x, y)


def eval_Kn(ball: WeightedBall, n: int, x, y):
    """Kernel of the orthogonal projector onto ``Pi_n``."""
    return kernel_eval(ball, np.ones(n + 1), x, y)


def eval_Ln(ball: WeightedBall, cutoff: Cutoff, n: int, x, y):
    """Smoothed kernel ``sum_nu a(nu/n) P_nu(x, y)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return kernel_eval(ball, lowpass_coeffs(cutoff, n), x, y)


def eval_Phi_j(ball: WeightedBall, cutoff: Cutoff, j: int, x, y):
    """Level-``j`` kernel ``sum_nu a(nu / 2^(j-1)) P_nu``; level 0 projects onto constants."""
    return kernel_eval(ball, band_coeffs(cutoff, j), x, y)


def projection_kernel_spectral(ball: WeightedBall, n: int, x, y):
    """``P_n(x_i, y_k)`` from the explicit orthonormal basis (independent of the Gegenbauer route)."""
    qx = ball_basis(ball, n, x)
    qy = ball_basis(ball, n, y)
    sel = basis_degrees(ball.d, n) == n
    return qx[:, sel] @ qy[:, sel].T


def convolve(ball: WeightedBall, coeffs, f_values, nodes, weights, x, *, exact_degree=None, f_degree=None):
    """Weighted convolution ``(K * f)(x) = int K(x, y) f(y) w(y) dy`` by cubature.

    ``nodes``/``weights`` form a cubature for ``w``; when both ``exact_degree``
    and ``f_degree`` are given, exactness of the rule is checked.
    """
    coeffs = np.atleast_1d(np.asarray(coeffs))
    if exact_degree is not None and f_degree is not None:
        if exact_degree < coeffs.size - 1 + f_degree:
            raise InsufficientQuadratureError(
                f"cubature exact to degree {exact_degree}, need {coeffs.size - 1 + f_degree}"
            )
    K = kernel_matrix(ball, coeffs, x, nodes)
    return K @ (np.asarray(weights) * np.asarray(f_values))


def lp_norm(values, weights, p: float) -> float:
    """Weighted ``L_p`` (quasi-)norm by cubature; ``p = inf`` is the grid maximum."""
    v = np.abs(np.asarray(values))
    if np.isinf(p):
        return float(np.max(v))
    return float(np.sum(np.asarray(weights) * v**p) ** (1.0 / p))


def localization_constant(ball: WeightedBall, cutoff: Cutoff, n: int, k: float, x, y) -> float:
    """Empirical ``c_k`` in ``|L_n(x,y)| <= c_k n^d / (sqrt(W(x) W(y)) (1 + n d(x,y))^k)``.

    ``x`` and ``y`` are point arrays; the maximum runs over all pairs.
    """
    L = kernel_matrix(ball, lowpass_coeffs(cutoff, n), x, y)
    dist = pairwise_distance(x, y)
    wx = np.sqrt(weight_W(ball, n, np.atleast_2d(x)))
    wy = np.sqrt(weight_W(ball, n, np.atleast_2d(y)))
    scaled = np.abs(L) * (1.0 + n * dist) ** k * np.outer(wx, wy) / n**ball.d
    return float(np.max(scaled))


def lipschitz_constant(ball: WeightedBall, cutoff: Cutoff, n: int, k: float, xi, x, y) -> float:
    """Empirical constant in the Lipschitz bound for ``L_n``.

    ``xi`` and ``x`` are paired arrays of centres and nearby points; ``y``
    are target points.  For each pair the bound is evaluated with the free
    point ``z`` chosen among ``{xi, x}`` to make the right-hand side largest,
    i.e. the estimate is the one the bound must satisfy for every ``z``.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    coeffs = lowpass_coeffs(cutoff, n)
    diff = np.abs(kernel_matrix(ball, coeffs, x, y) - kernel_matrix(ball, coeffs, xi, y))
    dxi = ball_distance(x, xi)
    wy = np.sqrt(weight_W(ball, n, y))
    best = None
    for z in (xi, x):
        wz = np.sqrt(weight_W(ball, n, z))
        decay = (1.0 + n * pairwise_distance(z, y)) ** k
        rhs = n ** (ball.d + 1) * dxi[:, None] / (np.outer(wz, wy) * decay)
        best = rhs if best is None else np.maximum(best, rhs)
    mask = dxi > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(diff[mask] / best[mask]))


def nikolskii_check(ball: WeightedBall, n: int, g_values, weights, p: float, q: float, gamma=None, points=None):
    """Ratio ``||g||_p / (n^((d+2mu)(1/q-1/p)) ||g||_q)`` for ``g`` in ``Pi_n``.

    With ``gamma`` (and ``points``) the weighted variant
    ``||W^gamma g||_p / (n^(d(1/q-1/p)) ||W^(gamma+1/p-1/q) g||_q)`` is returned.
    """
    if q > p:
        raise ValueError("requires q <= p")
    inv = (0.0 if np.isinf(q) else 1.0 / q) - (0.0 if np.isinf(p) else 1.0 / p)
    g = np.asarray(g_values)
    if gamma is None:
        return lp_norm(g, weights, p) / (n ** ((ball.d + 2 * ball.mu) * inv) * lp_norm(g, weights, q))
    W = weight_W(ball, n, points)
    ip = 0.0 if np.isinf(p) else 1.0 / p
    iq = 0.0 if np.isinf(q) else 1.0 / q
    num = lp_norm(W**gamma * g, weights, p)
    den = n ** (ball.d * inv) * lp_norm(W ** (gamma + ip - iq) * g, weights, q)
    return num / den
