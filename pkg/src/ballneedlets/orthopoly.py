"""Gegenbauer/Jacobi recurrences, Gauss-Jacobi rules and an orthonormal
polynomial basis of ``L2(B^d, w_mu)`` for ``d`` in {1, 2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln

from .geometry import WeightedBall


class QuadratureError(RuntimeError):
    """The tridiagonal eigen-solver failed to produce a valid rule."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule on ``[-1, 1]`` for the weight ``(1 - u^2)^(weight_exponent)``."""

    nodes: np.ndarray
    weights: np.ndarray
    weight_exponent: float
    exact_degree: int

    def integrate(self, values) -> np.ndarray:
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))


def eval_gegenbauer(lam: float, n: int, t):
    """Gegenbauer polynomial ``C_n^lam(t)`` by forward recurrence."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * lam * t
    for k in range(1, n):
        prev, cur = cur, (2.0 * (k + lam) * t * cur - (k + 2.0 * lam - 1.0) * prev) / (k + 1)
    return cur if cur.ndim else float(cur)


def eval_gegenbauer_sequence(lam: float, n_max: int, t) -> np.ndarray:
    """All of ``C_0^lam(t), ..., C_{n_max}^lam(t)`` stacked on a new leading axis."""
    t = np.asarray(t, dtype=float)
    out = np.empty((n_max + 1,) + t.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 2.0 * lam * t
    for k in range(1, n_max):
        out[k + 1] = (2.0 * (k + lam) * t * out[k] - (k + 2.0 * lam - 1.0) * out[k - 1]) / (k + 1)
    return out


def gegenbauer_weighted_sum(lam: float, coeffs, t) -> np.ndarray:
    """``sum_n coeffs[n] * C_n^lam(t)`` without materialising the sequence."""
    coeffs = np.asarray(coeffs)
    t = np.asarray(t, dtype=float)
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        return np.zeros(t.shape, dtype=coeffs.dtype)
    top = int(nz[-1])
    acc = coeffs[0] * np.ones_like(t) if coeffs[0] != 0 else np.zeros(t.shape, dtype=coeffs.dtype)
    if top == 0:
        return acc
    prev = np.ones_like(t)
    cur = 2.0 * lam * t
    if coeffs[1] != 0:
        acc = acc + coeffs[1] * cur
    for k in range(1, top):
        prev, cur = cur, (2.0 * (k + lam) * t * cur - (k + 2.0 * lam - 1.0) * prev) / (k + 1)
        if coeffs[k + 1] != 0:
            acc = acc + coeffs[k + 1] * cur
    return acc


def jacobi_recurrence(alpha: float, beta: float, n: int):
    """Orthonormal Jacobi recurrence ``t p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1}``.

    Returns ``(b, a, h0)`` where ``b`` has length ``n``, ``a[k]`` (``k >= 1``)
    has length ``n + 1`` with ``a[0] = 0``, and ``h0`` is the total mass of
    ``(1-t)^alpha (1+t)^beta`` on ``[-1, 1]``.
    """
    ab = alpha + beta
    k = np.arange(n, dtype=float)
    b = np.empty(n)
    if n:
        b[0] = (beta - alpha) / (ab + 2.0)
        kk = k[1:]
        b[1:] = (beta**2 - alpha**2) / ((2 * kk + ab) * (2 * kk + ab + 2))
    a = np.zeros(n + 1)
    if n >= 1:
        a[1] = math.sqrt(4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab)))
    if n >= 2:
        kk = np.arange(2, n + 1, dtype=float)
        a[2:] = np.sqrt(
            4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab)
            / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1) * (2 * kk + ab - 1))
        )
    log_h0 = (ab + 1) * math.log(2.0) + gammaln(alpha + 1) + gammaln(beta + 1) - gammaln(ab + 2)
    return b, a, math.exp(log_h0)


def gauss_jacobi(alpha: float, beta: float, k: int):
    """Golub-Welsch nodes and weights for ``(1-t)^alpha (1+t)^beta`` on ``[-1, 1]``."""
    if k < 1:
        raise ValueError("need at least one node")
    if alpha <= -1 or beta <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    b, a, h0 = jacobi_recurrence(alpha, beta, k)
    try:
        nodes, vecs = eigh_tridiagonal(b, a[1:k])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure path
        raise QuadratureError(f"tridiagonal eigensolver failed: {exc}") from exc
    weights = h0 * vecs[0] ** 2
    if not (np.all(np.isfinite(nodes)) and np.all(weights > 0)):
        raise QuadratureError("eigensolver returned non-finite nodes or non-positive weights")
    if alpha == beta:
        # enforce exact symmetry of the symmetric rule
        nodes = 0.5 * (nodes - nodes[::-1])
        weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def gauss_jacobi_rule(mu: float, k: int) -> QuadratureRule:
    """``k``-node Gauss rule for ``(1 - u^2)^(mu - 1)``; exact to degree ``2k - 1``."""
    if mu <= 0:
        raise ValueError("the u-integral rule needs mu > 0")
    nodes, weights = gauss_jacobi(mu - 1.0, mu - 1.0, k)
    return QuadratureRule(nodes=nodes, weights=weights, weight_exponent=mu - 1.0, exact_degree=2 * k - 1)


def jacobi_orthonormal_sequence(alpha: float, beta: float, n_max: int, t) -> np.ndarray:
    """Orthonormal Jacobi polynomials ``p_0..p_{n_max}`` at ``t`` (leading axis = degree)."""
    t = np.asarray(t, dtype=float)
    b, a, h0 = jacobi_recurrence(alpha, beta, n_max + 1)
    out = np.empty((n_max + 1,) + t.shape)
    out[0] = 1.0 / math.sqrt(h0)
    if n_max >= 1:
        out[1] = (t - b[0]) * out[0] / a[1]
    for k in range(1, n_max):
        out[k + 1] = ((t - b[k]) * out[k] - a[k] * out[k - 1]) / a[k + 1]
    return out


def basis_size(d: int, n: int) -> int:
    """``dim Pi_n`` in ``d`` variables."""
    return math.comb(n + d, d)


def basis_degrees(d: int, n: int) -> np.ndarray:
    """Degree of each column returned by :func:`ball_basis`."""
    return np.repeat(np.arange(n + 1), [math.comb(k + d - 1, d - 1) for k in range(n + 1)])


def ball_basis(ball: WeightedBall, n: int, points) -> np.ndarray:
    """Orthonormal basis of ``Pi_n`` in ``L2(w_mu)`` evaluated at ``points``.

    Columns are grouped by total degree (so the first ``basis_size(d, m)``
    columns span ``Pi_m``).  For ``d = 2`` the degree-``k`` block is
    ``r^m p_j^{(mu-1/2, m)}(2r^2-1) {cos, sin}(m theta)`` with ``k = m + 2j``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != ball.d:
        raise ValueError(f"points must have dimension {ball.d}")
    alpha = ball.mu - 0.5
    if ball.d == 1:
        return jacobi_orthonormal_sequence(alpha, alpha, n, pts[:, 0]).T.copy()
    if ball.d != 2:
        raise NotImplementedError("explicit orthonormal basis is provided for d in {1, 2}")

    npts = pts.shape[0]
    z = pts[:, 0] + 1j * pts[:, 1]
    t = 2.0 * np.clip(np.abs(z) ** 2, 0.0, 1.0) - 1.0
    out = np.empty((npts, basis_size(2, n)))
    # offsets of each degree block
    start = np.concatenate([[0], np.cumsum(np.arange(1, n + 2))])
    filled = np.zeros(n + 1, dtype=int)
    zm = np.ones(npts, dtype=complex)
    for m in range(n + 1):
        kmax = (n - m) // 2
        seq = jacobi_orthonormal_sequence(alpha, float(m), kmax, t)
        # angular normalisation: int cos^2(m theta) = pi for m > 0, 2 pi for m = 0
        scale = math.sqrt(2.0 ** (m + alpha + 2) / (2 * math.pi if m == 0 else math.pi))
        for k in range(kmax + 1):
            deg = m + 2 * k
            radial = scale * seq[k]
            col = start[deg] + filled[deg]
            if m == 0:
                out[:, col] = radial
                filled[deg] += 1
            else:
                out[:, col] = radial * zm.real
                out[:, col + 1] = radial * zm.imag
                filled[deg] += 2
        zm = zm * z
    return out
