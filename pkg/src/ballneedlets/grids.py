"""Per-level point sets with annular-sector partitions and positive cubature.

Cells are stored as rings in the hemisphere polar angle
``phi = arcsin |x|`` (``d = 2``) or the signed angle ``phi = arcsin x``
(``d = 1``); each ring of a ``d = 2`` grid is split into equal angular
sectors.  The level-``j`` cubature is exact on ``Pi_{2^(j+2)}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import brentq, lsq_linear
from scipy.special import betainc, gammaln

from .geometry import WeightedBall, as_points, ball_distance, weight_W
from .orthopoly import ball_basis, basis_size, gauss_jacobi

PRODUCT = "product"
QUASI_UNIFORM = "quasi_uniform"
STRATEGIES = (PRODUCT, QUASI_UNIFORM)

# quasi-uniform grids solve a dense moment system of size dim(Pi_D); the
# bounded least-squares fallback is only attempted for small systems
_QUASI_MAX_BASIS = 9000
_QUASI_LSQ_BASIS = 2500


class NNLSInfeasibleError(RuntimeError):
    """Positive weights matching all moments were not found; raise the point density."""


@dataclass(frozen=True)
class NeedletGrid:
    """Points, positive weights and the induced partition of one level.

    ``phi_edges`` holds the ring boundaries; for ``d = 2`` ring ``i`` has
    ``ring_counts[i]`` sectors starting at angle ``ring_offsets[i]``.
    """

    d: int
    mu: float
    level: int
    strategy: str
    exact_degree: int
    points: np.ndarray
    weights: np.ndarray
    phi_edges: np.ndarray
    ring_counts: np.ndarray
    ring_offsets: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return self.points.shape[0]

    @property
    def ring_start(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.ring_counts)])

    @property
    def cells(self) -> np.ndarray:
        """Cell descriptors: ``[x0, x1]`` (d=1) or ``[r0, r1, theta0, theta1]`` (d=2)."""
        if self.d == 1:
            return np.stack([np.sin(self.phi_edges[:-1]), np.sin(self.phi_edges[1:])], axis=1)
        rows = []
        for i, (n, off) in enumerate(zip(self.ring_counts, self.ring_offsets)):
            r0, r1 = np.sin(self.phi_edges[i]), np.sin(self.phi_edges[i + 1])
            step = 2 * np.pi / n
            th0 = off + step * np.arange(n)
            rows.append(np.column_stack([np.full(n, r0), np.full(n, r1), th0, th0 + step]))
        return np.vstack(rows)

    @property
    def cell_measures(self) -> np.ndarray:
        return cell_measures(WeightedBall(self.d, self.mu), self.cells)

    def to_dict(self) -> dict:
        hexlist = lambda a: [float(v).hex() for v in np.ravel(a)]  # noqa: E731
        return {
            "d": self.d,
            "mu": float(self.mu).hex(),
            "level": self.level,
            "strategy": self.strategy,
            "exact_degree": self.exact_degree,
            "points": [[float(v).hex() for v in p] for p in self.points],
            "weights": hexlist(self.weights),
            "cells": {
                "phi_edges": hexlist(self.phi_edges),
                "ring_counts": [int(c) for c in self.ring_counts],
                "ring_offsets": hexlist(self.ring_offsets),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NeedletGrid":
        unhex = lambda a: np.array([float.fromhex(v) for v in a], dtype=float)  # noqa: E731
        cells = data["cells"]
        pts = np.array([[float.fromhex(v) for v in p] for p in data["points"]], dtype=float)
        return cls(
            d=int(data["d"]),
            mu=float.fromhex(data["mu"]),
            level=int(data["level"]),
            strategy=data["strategy"],
            exact_degree=int(data["exact_degree"]),
            points=pts.reshape(-1, int(data["d"])),
            weights=unhex(data["weights"]),
            phi_edges=unhex(cells["phi_edges"]),
            ring_counts=np.array(cells["ring_counts"], dtype=int),
            ring_offsets=unhex(cells["ring_offsets"]),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "NeedletGrid":
        return cls.from_dict(json.loads(text))


def _d1_mass(mu: float, x):
    # int_{-1}^{x} (1 - s^2)^(mu - 1/2) ds
    a = mu + 0.5
    log_total = math.log(2.0) * (2 * a - 1) + gammaln(a) * 2 - gammaln(2 * a)
    u = np.clip((np.asarray(x, dtype=float) + 1.0) / 2.0, 0.0, 1.0)
    return math.exp(log_total) * betainc(a, a, u)


def cell_measures(ball: WeightedBall, cells) -> np.ndarray:
    """Weighted measure of interval (d=1) or annular-sector (d=2) cells, in closed form."""
    cells = np.atleast_2d(cells)
    if ball.d == 1:
        return _d1_mass(ball.mu, cells[:, 1]) - _d1_mass(ball.mu, cells[:, 0])
    e = ball.mu + 0.5
    g0 = np.clip(1.0 - cells[:, 0] ** 2, 0.0, None) ** e
    g1 = np.clip(1.0 - cells[:, 1] ** 2, 0.0, None) ** e
    return (cells[:, 3] - cells[:, 2]) * (g0 - g1) / (2.0 * e)


def moment_oracle(ball: WeightedBall, alpha) -> float:
    """``int x^alpha w_mu(x) dx`` over the ball (zero if any exponent is odd)."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=int))
    if alpha.size != ball.d or np.any(alpha < 0):
        raise ValueError("multi-index must have d non-negative entries")
    if np.any(alpha % 2):
        return 0.0
    s = float(np.sum(alpha))
    log_val = np.sum(gammaln((alpha + 1) / 2.0)) + gammaln(ball.mu + 0.5) - gammaln(
        s / 2 + ball.d / 2 + ball.mu + 0.5
    )
    return float(np.exp(log_val))


def power_moment(ball: WeightedBall, a, b: float, degree: int) -> float:
    """``int (<a,x> + b)^degree w dx`` by binomial expansion and rotational invariance."""
    a = np.asarray(a, dtype=float)
    na = float(np.linalg.norm(a))
    e1 = np.zeros(ball.d, dtype=int)
    total = 0.0
    for m in range(0, degree + 1, 2):
        e1[0] = m
        total += math.comb(degree, m) * b ** (degree - m) * na**m * moment_oracle(ball, e1)
    return total


def _radial_rule(mu: float, degree: int):
    # Gauss rule in t = 2r^2 - 1 for r (1 - r^2)^(mu - 1/2) dr; exact on even radial
    # polynomials of degree <= degree, which is all that survives angular averaging
    n = degree // 4 + 1
    t, w = gauss_jacobi(mu - 0.5, 0.0, n)
    return np.sqrt((1.0 + t) / 2.0), w * 2.0 ** (-(mu - 0.5)) / 4.0


def _product_grid(ball: WeightedBall, j: int, degree: int) -> NeedletGrid:
    if ball.d == 1:
        n = (degree + 2) // 2
        n += n % 2  # even node count keeps the origin out of the grid
        x, w = gauss_jacobi(ball.mu - 0.5, ball.mu - 0.5, n)
        phi = np.arcsin(x)
        edges = np.concatenate([[-np.pi / 2], 0.5 * (phi[1:] + phi[:-1]), [np.pi / 2]])
        return NeedletGrid(
            d=1, mu=ball.mu, level=j, strategy=PRODUCT, exact_degree=degree,
            points=x[:, None], weights=w, phi_edges=edges,
            ring_counts=np.ones(n, dtype=int), ring_offsets=np.zeros(n),
        )
    if ball.d != 2:
        raise NotImplementedError("grids are provided for d in {1, 2}")
    r, wr = _radial_rule(ball.mu, degree)
    n_theta = degree + 1
    step = 2 * np.pi / n_theta
    theta = step * np.arange(n_theta)
    pts = np.stack(
        [np.outer(r, np.cos(theta)).ravel(), np.outer(r, np.sin(theta)).ravel()], axis=1
    )
    weights = np.repeat(wr * step, n_theta)
    phi = np.arcsin(r)
    edges = np.concatenate([[0.0], 0.5 * (phi[1:] + phi[:-1]), [np.pi / 2]])
    return NeedletGrid(
        d=2, mu=ball.mu, level=j, strategy=PRODUCT, exact_degree=degree,
        points=pts, weights=weights, phi_edges=edges,
        ring_counts=np.full(r.size, n_theta), ring_offsets=np.full(r.size, -step / 2),
    )


def _boundary_rings(mu: float, h: float, n: float) -> list:
    """Ring thicknesses (in ``phi``) marching inward from the boundary.

    Near the boundary a ring of thickness ``h`` carries far less mass than
    ``h^2 W(n; xi)``; each ring is widened until its mass per unit azimuth
    reaches half of ``h (cos phi_c + 1/n)^(2 mu)``, up to ``3 h``.  Stops once
    ``h`` suffices.
    """
    out, s0 = [], 0.0

    def mass(a, b):
        return quad(lambda s: np.sin(s) ** (2 * mu), a, b)[0]

    while s0 < np.pi / 2 - h:
        f = lambda t: mass(s0, s0 + t) - 0.5 * h * (np.sin(s0 + t / 2) + 1.0 / n) ** (2 * mu)  # noqa: E731
        if f(h) >= 0:
            break
        hi = h
        while f(hi) < 0 and s0 + hi < np.pi / 2:
            hi *= 1.5
        top = min(hi, 3 * h, np.pi / 2 - s0)
        if f(top) < 0:
            out.append(top)
            s0 += top
            continue
        t = brentq(f, h, top)
        out.append(t)
        s0 += t
    return out


def _quasi_layout(d: int, h: float, mu: float = 0.5, n: float | None = None):
    """Ring edges, sector counts, offsets and centre points of a tiling with mesh ``h``.

    For ``d = 2``, ``n`` (the level resolution ``2^j``) widens the boundary
    rings so that cell masses stay comparable to ``h^2 W(n; xi)``.
    """
    wide = _boundary_rings(mu, h, n) if n is not None and d == 2 else []
    if d == 1:
        inner = np.pi / 2 - sum(wide)
        k = max(1, int(math.ceil(2 * inner / h)))
        right = list(np.pi / 2 - np.cumsum([0.0] + wide)[::-1])
        edges = np.concatenate([-np.array(right[::-1]), np.linspace(-inner, inner, k + 1)[1:-1], right])
        edges = np.unique(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        return edges, np.ones(mid.size, dtype=int), np.zeros(mid.size), np.sin(mid)[:, None]
    outer = np.pi / 2 - np.cumsum([0.0] + wide)[::-1]  # increasing, ends at pi/2
    inner = outer[0]
    n_rings = max(1, int(math.ceil((inner - h / 2) / h)))
    edges = np.concatenate([[0.0], np.linspace(min(h / 2, inner / 2), inner, n_rings + 1), outer[1:]])
    counts = [1]
    offsets = [0.0]
    pts = [np.zeros((1, 2))]
    for i in range(edges.size - 2):
        a, b = edges[i + 1], edges[i + 2]
        mid = 0.5 * (a + b)
        k = max(3, int(round(2 * np.pi * np.sin(mid) / h)))
        step = 2 * np.pi / k
        off = 0.0 if i % 2 == 0 else step / 2
        th = off + step * (np.arange(k) + 0.5)
        pts.append(np.sin(mid) * np.column_stack([np.cos(th), np.sin(th)]))
        counts.append(k)
        offsets.append(off)
    return edges, np.array(counts), np.array(offsets), np.vstack(pts)


_FIT_CHUNK = 2048


def _moment_residual(ball: WeightedBall, points, lam, degree: int) -> np.ndarray:
    res = np.zeros(basis_size(ball.d, degree))
    for s in range(0, len(points), _FIT_CHUNK):
        res += lam[s : s + _FIT_CHUNK] @ ball_basis(ball, degree, points[s : s + _FIT_CHUNK])
    res[0] -= 1.0 / math.sqrt(ball.b_d_mu)
    return res


def _column_layout(degree: int):
    """Angular frequency and cos/sin flag of each ``d = 2`` basis column, plus per-frequency columns."""
    K = basis_size(2, degree)
    freq = np.empty(K, dtype=int)
    is_sin = np.zeros(K, dtype=bool)
    start = np.concatenate([[0], np.cumsum(np.arange(1, degree + 2))])
    filled = np.zeros(degree + 1, dtype=int)
    cos_cols = [[] for _ in range(degree + 1)]
    sin_cols = [[] for _ in range(degree + 1)]
    for m in range(degree + 1):
        for k in range((degree - m) // 2 + 1):
            deg = m + 2 * k
            col = start[deg] + filled[deg]
            freq[col] = m
            cos_cols[m].append(col)
            if m > 0:
                freq[col + 1] = m
                is_sin[col + 1] = True
                sin_cols[m].append(col + 1)
            filled[deg] += 1 if m == 0 else 2
    return freq, is_sin, [np.array(c) for c in cos_cols], [np.array(c) for c in sin_cols]


def _ring_structure(points, prior, counts):
    """Radii, first angles and priors of equispaced rings, or ``None`` if the points are not such rings."""
    if counts is None or int(np.sum(counts)) != len(points):
        return None
    radii, theta0, p = [], [], []
    s = 0
    for n in counts:
        block = points[s : s + n]
        r = np.linalg.norm(block, axis=1)
        th = np.arctan2(block[:, 1], block[:, 0])
        expect = th[0] + 2 * np.pi * np.arange(n) / n
        if (np.ptp(r) > 1e-13 or np.ptp(prior[s : s + n]) > 1e-13 * prior[s]
                or np.max(np.abs(np.angle(np.exp(1j * (th - expect))))) > 1e-11):
            return None
        radii.append(r[0])
        theta0.append(th[0])
        p.append(prior[s])
        s += n
    return np.array(radii), np.array(theta0), np.array(p)


def _ring_gram(ball: WeightedBall, degree: int, counts, radii, theta0, prior) -> np.ndarray:
    """``sum_i prior_i q(x_i) q(x_i)^T`` for points on equispaced rings.

    On a ring of ``n`` points the angular sums are closed form: they vanish
    unless the frequency sum or difference is a multiple of ``n``.
    """
    K = basis_size(2, degree)
    _, _, cos_cols, sin_cols = _column_layout(degree)
    R = ball_basis(ball, degree, np.column_stack([radii, np.zeros_like(radii)]))  # radial parts on cos columns
    G = np.zeros((K, K))
    for r, n in enumerate(counts):
        n = int(n)

        def C(q):
            return n * np.cos(q * theta0[r]) if q % n == 0 else 0.0

        def S(q):
            return n * np.sin(q * theta0[r]) if q % n == 0 else 0.0

        for ma in range(degree + 1):
            ra = R[r, cos_cols[ma]]
            partners = set(range(ma % n, degree + 1, n)) | set(range((-ma) % n, degree + 1, n))
            for mb in partners:
                rb = R[r, cos_cols[mb]]
                out = prior[r] * np.outer(ra, rb)
                dif, tot = ma - mb, ma + mb
                cc = 0.5 * (C(dif) + C(tot))
                if cc:
                    G[np.ix_(cos_cols[ma], cos_cols[mb])] += cc * out
                if ma and mb:
                    ss = 0.5 * (C(dif) - C(tot))
                    if ss:
                        G[np.ix_(sin_cols[ma], sin_cols[mb])] += ss * out
                if ma:
                    sc = 0.5 * (S(tot) + S(dif))
                    if sc:
                        G[np.ix_(sin_cols[ma], cos_cols[mb])] += sc * out
                if mb:
                    cs = 0.5 * (S(tot) - S(dif))
                    if cs:
                        G[np.ix_(cos_cols[ma], sin_cols[mb])] += cs * out
    return G


def _fit_weights(ball: WeightedBall, points, prior, degree: int, counts=None):
    """Positive weights reproducing all moments of ``Pi_degree``.

    Starts from the cell-measure prior and applies the minimum relative
    change ``lam = prior (1 + A^T y)`` that matches every moment; small
    systems fall back to a bounded least-squares fit.  ``counts`` (points
    per ring) enables the closed-form Gram matrix for ring layouts.
    """
    K = basis_size(ball.d, degree)
    resid = -_moment_residual(ball, points, prior, degree)
    rings = _ring_structure(points, prior, counts) if ball.d == 2 else None
    if rings is not None:
        G = _ring_gram(ball, degree, counts, *rings)
    else:
        G = np.zeros((K, K))
        for s in range(0, len(points), _FIT_CHUNK):
            Q = ball_basis(ball, degree, points[s : s + _FIT_CHUNK])
            G += (Q * prior[s : s + _FIT_CHUNK, None]).T @ Q
    try:
        y = cho_solve(cho_factor(G, overwrite_a=True), resid, overwrite_b=True)
        del G
        lam = np.empty_like(prior)
        for s in range(0, len(points), _FIT_CHUNK):
            Q = ball_basis(ball, degree, points[s : s + _FIT_CHUNK])
            lam[s : s + _FIT_CHUNK] = prior[s : s + _FIT_CHUNK] * (1.0 + Q @ y)
    except np.linalg.LinAlgError:
        lam = np.full_like(prior, -1.0)
    if np.all(lam > 0) or K > _QUASI_LSQ_BASIS:
        return lam
    # bounded least squares in relative coordinates lam = prior (1 + delta)
    A = ball_basis(ball, degree, points).T
    AD = A * prior
    tau = 1e-6
    M = np.vstack([AD, tau * np.eye(prior.size)])
    rhs = np.concatenate([resid, np.zeros(prior.size)])
    sol = lsq_linear(M, rhs, bounds=(-0.999, np.inf), lsmr_tol="auto", tol=1e-14, max_iter=5000)
    return prior * (1.0 + sol.x)


def _quasi_uniform_grid(ball: WeightedBall, j: int, degree: int, mesh: float | None) -> NeedletGrid:
    if basis_size(ball.d, degree) > _QUASI_MAX_BASIS:
        raise ValueError(f"quasi_uniform grids are limited to dim(Pi_D) <= {_QUASI_MAX_BASIS}")
    h0 = mesh if mesh is not None else (0.9 if ball.d == 1 else 0.55) * 2.0**-j
    # widened boundary rings first, then the plain layout, each with shrinking mesh
    attempts = [(h0 * 0.85**k, 2.0**j) for k in range(4)] + [(h0 * 0.85**k, None) for k in range(6)]
    best, best_quality = None, 0.0
    for h, n in attempts:
        edges, counts, offsets, pts = _quasi_layout(ball.d, h, ball.mu, n)
        if j == 1:
            at_origin = np.linalg.norm(pts, axis=1) == 0
            pts = pts.copy()
            pts[at_origin, 0] = 2.0 ** (-j - 3)
        grid = NeedletGrid(
            d=ball.d, mu=ball.mu, level=j, strategy=QUASI_UNIFORM, exact_degree=degree,
            points=pts, weights=np.ones(len(pts)), phi_edges=edges,
            ring_counts=counts, ring_offsets=offsets,
        )
        prior = grid.cell_measures
        if len(pts) < basis_size(ball.d, degree):
            continue
        lam = _fit_weights(ball, pts, prior, degree, counts)
        res = _moment_residual(ball, pts, lam, degree)
        if not (np.all(lam > 0) and np.max(np.abs(res)) <= 1e-10):
            continue
        # keep weights close to the cell measures: accept once lam / prior stays within [1/8, 8] overall
        rel = lam / prior
        quality = float(rel.min() / rel.max())
        if quality > best_quality:
            best_quality = quality
            best = NeedletGrid(
                d=ball.d, mu=ball.mu, level=j, strategy=QUASI_UNIFORM, exact_degree=degree,
                points=pts, weights=lam, phi_edges=edges, ring_counts=counts,
                ring_offsets=offsets, meta={"mesh": h, "boundary_widening": n is not None},
            )
        if quality >= 1.0 / 8:
            break
    if best is not None:
        return best
    raise NNLSInfeasibleError(f"no positive moment-matching weights at level {j}; raise point density")


def build_grid(ball: WeightedBall, j: int, strategy: str = PRODUCT, degree: int | None = None,
               mesh: float | None = None) -> NeedletGrid:
    """Level-``j`` grid with cubature exact on ``Pi_{2^(j+2)}`` (or ``Pi_degree``)."""
    if j < 0:
        raise ValueError("level must be >= 0")
    if ball.d not in (1, 2):
        raise NotImplementedError("grids are provided for d in {1, 2}")
    degree = 2 ** (j + 2) if degree is None else int(degree)
    if strategy == PRODUCT:
        return _product_grid(ball, j, degree)
    if strategy in (QUASI_UNIFORM, "quasi-uniform"):
        return _quasi_uniform_grid(ball, j, degree, mesh)
    raise ValueError(f"unknown strategy {strategy!r}")


def locate_cell(grid: NeedletGrid, x) -> np.ndarray:
    """Index of the cell containing each point (ties go to the lower index)."""
    x = as_points(x, grid.d)
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    if grid.d == 1:
        phi = np.arcsin(np.clip(x[:, 0], -1.0, 1.0))
    else:
        phi = np.arcsin(np.clip(np.linalg.norm(x, axis=1), 0.0, 1.0))
    ring = np.clip(np.searchsorted(grid.phi_edges, phi, side="left") - 1, 0, len(grid.ring_counts) - 1)
    if grid.d == 1:
        idx = ring
    else:
        theta = np.arctan2(x[:, 1], x[:, 0])
        counts = grid.ring_counts[ring]
        step = 2 * np.pi / counts
        rel = np.mod(theta - grid.ring_offsets[ring], 2 * np.pi) / step
        sector = np.mod(np.floor(rel).astype(int), counts)
        idx = grid.ring_start[ring] + sector
    return int(idx[0]) if scalar else idx


def weight_equivalence_band(grid: NeedletGrid) -> tuple[float, float]:
    """Range of ``lambda_xi / (2^(-jd) W(2^j; xi))`` over the grid."""
    ball = WeightedBall(grid.d, grid.mu)
    ratio = grid.weights / (2.0 ** (-grid.level * grid.d) * weight_W(ball, 2.0**grid.level, grid.points))
    return float(ratio.min()), float(ratio.max())


def cell_equivalence_band(grid: NeedletGrid) -> tuple[float, float]:
    """Range of ``m(R_xi) / (2^(-jd) W(2^j; xi))`` over the grid."""
    ball = WeightedBall(grid.d, grid.mu)
    ratio = grid.cell_measures / (2.0 ** (-grid.level * grid.d) * weight_W(ball, 2.0**grid.level, grid.points))
    return float(ratio.min()), float(ratio.max())


def cell_diameters(grid: NeedletGrid, samples: int = 9) -> np.ndarray:
    """Largest distance from each centre to sampled points of its cell."""
    s = (np.arange(samples) + 0.0) / (samples - 1)
    cells = grid.cells
    if grid.d == 1:
        pts = cells[:, :1] + (cells[:, 1:2] - cells[:, :1]) * s[None, :]
        return np.max(ball_distance(pts[..., None], grid.points[:, None, :]), axis=1)
    phi0 = np.arcsin(cells[:, 0])
    phi1 = np.arcsin(np.clip(cells[:, 1], 0.0, 1.0))
    ph = phi0[:, None, None] + (phi1 - phi0)[:, None, None] * s[None, :, None]
    th = cells[:, 2, None, None] + (cells[:, 3] - cells[:, 2])[:, None, None] * s[None, None, :]
    rr = np.sin(ph)
    pts = np.stack([rr * np.cos(th), rr * np.sin(th)], axis=-1)
    dist = ball_distance(pts, grid.points[:, None, None, :])
    return dist.reshape(len(grid), -1).max(axis=1)
