"""Geometry of the unit ball with the weight ``(1 - |x|^2)^(mu - 1/2)``.

Points are handled as arrays whose last axis has length ``d``.  The
intrinsic distance is the geodesic distance between the lifts
``x -> (x, sqrt(1 - |x|^2))`` on the upper unit hemisphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammaln


class DivergentWeightError(ValueError):
    """The weight is infinite at the requested point."""


class UnsupportedMuError(ValueError):
    """Kernel evaluation requested with ``mu == 0``."""


class IntegrationError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


def _log_ball_mass(d: int, gamma: float) -> float:
    # int_{B^d} (1-|x|^2)^(gamma-1/2) dx = pi^(d/2) Gamma(gamma+1/2) / Gamma(gamma+1/2+d/2)
    return 0.5 * d * np.log(np.pi) + gammaln(gamma + 0.5) - gammaln(gamma + 0.5 + 0.5 * d)


@dataclass(frozen=True)
class WeightedBall:
    """The ball ``B^d`` with weight exponent ``mu``.

    Attributes
    ----------
    d : int
        Dimension.
    mu : float
        Weight exponent, ``w(x) = (1 - |x|^2)^(mu - 1/2)``.
    lam : float
        Gegenbauer index ``mu + (d - 1) / 2``.
    b_d_mu : float
        Reciprocal of the total mass ``int_B w``.
    b_1_half : float
        Reciprocal of ``int_{-1}^{1} (1 - u^2)^(mu - 1) du`` (``nan`` when ``mu == 0``).
    """

    d: int
    mu: float
    lam: float = field(init=False)
    b_d_mu: float = field(init=False)
    b_1_half: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        if not np.isfinite(self.mu) or self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "lam", self.mu + (self.d - 1) / 2)
        object.__setattr__(self, "b_d_mu", float(np.exp(-_log_ball_mass(self.d, self.mu))))
        if self.mu > 0:
            # int_{-1}^{1} (1-u^2)^(mu-1) du = B(1/2, mu)
            log_mass = gammaln(0.5) + gammaln(self.mu) - gammaln(self.mu + 0.5)
            object.__setattr__(self, "b_1_half", float(np.exp(-log_mass)))
        else:
            object.__setattr__(self, "b_1_half", float("nan"))

    @property
    def total_mass(self) -> float:
        return 1.0 / self.b_d_mu

    def require_kernel_support(self):
        if self.mu <= 0:
            raise UnsupportedMuError("kernel evaluation requires mu > 0 (unsupported-mu)")


def as_points(x, d: int | None = None) -> np.ndarray:
    """Return ``x`` as a float array of points, validating ``|x| <= 1``."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1)
    if d is not None and pts.shape[-1] != d:
        raise ValueError(f"expected points of dimension {d}, got shape {pts.shape}")
    norms = np.linalg.norm(pts, axis=-1)
    if np.any(norms > 1 + 1e-12):
        raise ValueError("points must lie in the closed unit ball")
    return pts


def boundary_gap(x) -> np.ndarray:
    """``sqrt(1 - |x|^2)``, clipped at zero."""
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.clip(1.0 - np.sum(x * x, axis=-1), 0.0, None))


def ball_distance(x, y) -> np.ndarray:
    """Intrinsic distance ``arccos(<x,y> + sqrt(1-|x|^2) sqrt(1-|y|^2))``.

    Evaluated as ``2 arcsin(|X - Y| / 2)`` on the lifted points, which stays
    accurate for nearby points where the arccos form loses half the digits.
    Broadcasts over leading axes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    chord2 = np.sum((x - y) ** 2, axis=-1) + (boundary_gap(x) - boundary_gap(y)) ** 2
    return 2.0 * np.arcsin(np.clip(0.5 * np.sqrt(chord2), 0.0, 1.0))


def pairwise_distance(x, y) -> np.ndarray:
    """Distance matrix between point arrays of shapes ``(n, d)`` and ``(m, d)``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    return ball_distance(x[:, None, :], y[None, :, :])


def weight_w(ball: WeightedBall, x) -> np.ndarray:
    """The weight ``(1 - |x|^2)^(mu - 1/2)``."""
    x = np.asarray(x, dtype=float)
    base = np.clip(1.0 - np.sum(x * x, axis=-1), 0.0, None)
    expo = ball.mu - 0.5
    if expo < 0 and np.any(base == 0):
        raise DivergentWeightError("weight diverges on the boundary when mu < 1/2")
    if expo == 0:
        return np.ones_like(base)
    return base**expo


def weight_W(ball: WeightedBall, n, x) -> np.ndarray:
    """The resolution factor ``(sqrt(1-|x|^2) + 1/n)^(2 mu)``."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 1):
        raise ValueError("n must be >= 1")
    return (boundary_gap(x) + 1.0 / n) ** (2 * ball.mu)


def norm_dist_bound_check(x, y) -> np.ndarray:
    """Check ``|sqrt(1-|x|^2) - sqrt(1-|y|^2)| <= sqrt(2) d(x, y)`` pointwise."""
    lhs = np.abs(boundary_gap(x) - boundary_gap(y))
    return lhs <= np.sqrt(2.0) * ball_distance(x, y) + 1e-14


def lift(x) -> np.ndarray:
    """Map ball points to the upper hemisphere of ``S^d``."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, boundary_gap(x)[..., None]], axis=-1)


def polar_angle(x) -> np.ndarray:
    """Angle of the lifted point from the north pole, ``arcsin |x|`` in ``[0, pi/2]``."""
    x = np.asarray(x, dtype=float)
    return np.arcsin(np.clip(np.linalg.norm(x, axis=-1), 0.0, 1.0))


def ball_measure(ball: WeightedBall, center, r: float, rtol: float = 1e-8) -> float:
    """Weighted measure ``m(B_center(r))`` of a metric ball.

    The integral is carried out in hemisphere coordinates, where
    ``w(x) dx = sin(phi)^(d-1) cos(phi)^(2 mu) dphi dsigma``; the angular
    extent at each polar angle is closed form, leaving a 1-D adaptive
    quadrature.  Supported for ``d`` in {1, 2}.
    """
    if not 0 < r <= np.pi + 1e-15:
        raise ValueError("radius must lie in (0, pi]")
    center = as_points(center, ball.d)
    mu2 = 2.0 * ball.mu
    phi0 = float(polar_angle(center))
    if ball.d == 1:
        # signed polar angle: x = sin(phi); distance is |phi - phi0|
        phi0 = float(np.arcsin(np.clip(center[0], -1.0, 1.0)))
        lo, hi = max(-np.pi / 2, phi0 - r), min(np.pi / 2, phi0 + r)
        if hi <= lo:
            return 0.0
        val, err = integrate.quad(lambda p: np.cos(p) ** mu2, lo, hi, epsabs=0, epsrel=rtol, limit=200)
        if err > 10 * rtol * max(abs(val), 1e-300):
            raise IntegrationError(f"ball_measure failed to converge (err={err:g})")
        return float(val)
    if ball.d != 2:
        raise NotImplementedError("ball_measure supports d in {1, 2}")

    cr = np.cos(r)
    s0, c0 = np.sin(phi0), np.cos(phi0)

    def angular_extent(phi):
        # lifted points at polar angle phi within distance r of the center
        if s0 < 1e-15 or np.sin(phi) < 1e-15:
            return 2 * np.pi if np.cos(phi) * c0 > cr else 0.0
        a = (cr - np.cos(phi) * c0) / (np.sin(phi) * s0)
        return 2.0 * np.arccos(np.clip(a, -1.0, 1.0))

    def integrand(phi):
        return np.sin(phi) * np.cos(phi) ** mu2 * angular_extent(phi)

    lo = max(0.0, phi0 - r)
    hi = min(np.pi / 2, phi0 + r)
    if hi <= lo:
        return 0.0
    pts = sorted({p for p in (abs(phi0 - r), r - phi0) if lo < p < hi})
    val, err = integrate.quad(integrand, lo, hi, points=pts or None, epsabs=0, epsrel=rtol, limit=400)
    if err > 10 * rtol * max(abs(val), 1e-300):
        raise IntegrationError(f"ball_measure failed to converge (err={err:g})")
    return float(val)
