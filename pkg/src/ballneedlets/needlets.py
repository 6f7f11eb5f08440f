"""Needlet frames on the ball: construction, analysis and synthesis.

A frame holds one grid per level ``0..J``.  Level ``j >= 1`` needlets are

    phi_xi(x) = lambda_xi^(1/2) sum_nu a(nu / 2^(j-1)) P_nu(x, xi),
    psi_xi(x) = lambda_xi^(1/2) sum_nu b(nu / 2^(j-1)) P_nu(x, xi),

and level 0 uses the projection onto constants.  Bulk operations expand
the kernels in the orthonormal basis of ``Pi_{2^J}``; single needlets can
also be evaluated from the Gegenbauer integral (:func:`eval_needlet`).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .cutoffs import CutoffPair, eval_cutoff, make_pair
from .geometry import WeightedBall, as_points, ball_distance, weight_W
from .grids import PRODUCT, NeedletGrid, build_grid
from .kernels import band_coeffs, kernel_eval, kernel_matrix
from .orthopoly import ball_basis, basis_degrees, basis_size

ANALYSIS = "analysis"
SYNTHESIS = "synthesis"

_ROWS = 16384


class FrameMismatchError(ValueError):
    """Coefficients were produced by a different frame."""


def _multipliers(cutoff, j: int, degrees: np.ndarray) -> np.ndarray:
    if j == 0:
        return (degrees == 0).astype(float)
    return eval_cutoff(cutoff, degrees / 2.0 ** (j - 1))


@dataclass
class NeedletFrame:
    """Analysis/synthesis needlet systems for levels ``0..J``.

    Use :meth:`build` to construct one.  ``analysis_grid`` is a product
    cubature of degree ``2^(J + 2 + analysis_oversample)`` used for inner
    products with general functions and for ``L_p`` norms.
    """

    ball: WeightedBall
    pair: CutoffPair
    J: int
    strategy: str
    levels: list
    analysis_grid: NeedletGrid
    cutoff_spec: str = "self-dual"
    analysis_oversample: int = 2
    _basis: list = field(default_factory=list, repr=False)
    _hash: str = field(default="", repr=False)

    @classmethod
    def build(cls, d: int = 2, mu: float = 1.0, J: int = 3, strategy: str = PRODUCT,
              cutoff: str = "self-dual", analysis_oversample: int = 2) -> "NeedletFrame":
        ball = WeightedBall(d, mu)
        ball.require_kernel_support()
        pair = make_pair(cutoff)
        levels = [build_grid(ball, j, strategy) for j in range(J + 1)]
        return cls._assemble(ball, pair, J, strategy, levels, cutoff, analysis_oversample)

    @classmethod
    def _assemble(cls, ball, pair, J, strategy, levels, cutoff_spec, analysis_oversample):
        agrid = build_grid(ball, J + analysis_oversample, PRODUCT)
        frame = cls(ball=ball, pair=pair, J=J, strategy=strategy, levels=levels, analysis_grid=agrid,
                    cutoff_spec=cutoff_spec, analysis_oversample=analysis_oversample)
        frame._basis = [ball_basis(ball, 2**j, g.points) for j, g in enumerate(levels)]
        frame._hash = hashlib.sha256(frame._canonical().encode()).hexdigest()
        return frame

    # -- identity and serialisation ------------------------------------------------
    def _canonical(self) -> str:
        body = {
            "d": self.ball.d,
            "mu": float(self.ball.mu).hex(),
            "J": self.J,
            "strategy": self.strategy,
            "cutoff": self.cutoff_spec,
            "analysis_oversample": self.analysis_oversample,
            "levels": [g.to_dict() for g in self.levels],
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @property
    def frame_hash(self) -> str:
        return self._hash

    def to_json(self) -> str:
        body = json.loads(self._canonical())
        body["frame_hash"] = self.frame_hash
        body["cutoff_params"] = self.pair.params()
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "NeedletFrame":
        data = json.loads(text)
        ball = WeightedBall(int(data["d"]), float.fromhex(data["mu"]))
        levels = [NeedletGrid.from_dict(g) for g in data["levels"]]
        frame = cls._assemble(ball, make_pair(data["cutoff"]), int(data["J"]), data["strategy"], levels,
                              data["cutoff"], int(data["analysis_oversample"]))
        if data.get("frame_hash") not in (None, frame.frame_hash):
            raise FrameMismatchError("stored frame_hash does not match the frame content")
        return frame

    # -- structure ------------------------------------------------------------------
    @property
    def degree(self) -> int:
        """Highest polynomial degree carried by any needlet."""
        return 2**self.J

    @property
    def sizes(self) -> list:
        return [len(g) for g in self.levels]

    def keys(self):
        for j, g in enumerate(self.levels):
            for i in range(len(g)):
                yield (j, i)

    def multipliers(self, j: int, which: str = ANALYSIS) -> np.ndarray:
        """Spectral multipliers of the level-``j`` kernel on the basis of ``Pi_{2^j}``."""
        cut = self.pair.a_hat if which == ANALYSIS else self.pair.b_hat
        return _multipliers(cut, j, basis_degrees(self.ball.d, 2**j))

    # -- spectral helpers -----------------------------------------------------------
    def sample(self, f) -> np.ndarray:
        """Values of a callable (or pass-through array) on the analysis nodes."""
        if callable(f):
            return np.asarray(f(self.analysis_grid.points))
        vals = np.asarray(f)
        if vals.shape[0] != len(self.analysis_grid):
            raise ValueError("sampled function must live on the analysis grid")
        return vals

    def spectral_coefficients(self, f, degree: int | None = None) -> np.ndarray:
        """Orthonormal-basis coefficients ``int f Q_k w`` for ``deg Q_k <= degree``."""
        degree = self.degree if degree is None else degree
        vals = self.sample(f)
        g = self.analysis_grid
        out = None
        for s in range(0, len(g), _ROWS):
            Q = ball_basis(self.ball, degree, g.points[s : s + _ROWS])
            part = (g.weights[s : s + _ROWS] * vals[s : s + _ROWS]) @ Q
            out = part if out is None else out + part
        return out

    def evaluate_expansion(self, coeffs, points) -> np.ndarray:
        """``sum_k coeffs_k Q_k(x)`` at ``points`` (coefficients ordered by degree)."""
        coeffs = np.asarray(coeffs)
        K = coeffs.shape[0]
        n = 0
        while basis_size(self.ball.d, n) < K:
            n += 1
        if basis_size(self.ball.d, n) != K:
            raise ValueError("coefficient vector length is not dim(Pi_n)")
        points = np.atleast_2d(points)
        out = np.empty((points.shape[0],) + coeffs.shape[1:], dtype=np.result_type(coeffs, float))
        for s in range(0, points.shape[0], _ROWS):
            out[s : s + _ROWS] = ball_basis(self.ball, n, points[s : s + _ROWS]) @ coeffs
        return out

    def level_spectrum(self, fhat, j: int, which: str = ANALYSIS) -> np.ndarray:
        """Basis coefficients of ``Phi_j * f`` (or ``Psi_j * f``), length ``dim Pi_{2^J}``."""
        K = basis_size(self.ball.d, 2**j)
        out = np.zeros(basis_size(self.ball.d, self.degree), dtype=np.result_type(fhat, complex))
        m = self.multipliers(j, which)
        out[:K] = (np.conj(m) if which == ANALYSIS else m) * fhat[:K]
        if np.isrealobj(fhat) and np.isrealobj(m):
            return out.real
        return out


@dataclass
class CoefficientSet:
    """Needlet coefficients keyed by ``(level, point index)``, stored densely per level."""

    frame_hash: str
    levels: list
    meta: dict = field(default_factory=dict)

    def __getitem__(self, key):
        j, i = key
        return self.levels[j][i]

    def __len__(self):
        return int(sum(len(v) for v in self.levels))

    def keys(self):
        for j, v in enumerate(self.levels):
            for i in range(len(v)):
                yield (j, i)

    def flat(self) -> np.ndarray:
        return np.concatenate(self.levels)

    def scaled(self, alpha) -> "CoefficientSet":
        return CoefficientSet(self.frame_hash, [alpha * v for v in self.levels], dict(self.meta))

    def __add__(self, other: "CoefficientSet") -> "CoefficientSet":
        if other.frame_hash != self.frame_hash:
            raise FrameMismatchError("cannot add coefficients of different frames")
        return CoefficientSet(self.frame_hash, [a + b for a, b in zip(self.levels, other.levels)], dict(self.meta))

    @classmethod
    def empty(cls, frame: NeedletFrame, dtype=float) -> "CoefficientSet":
        return cls(frame.frame_hash, [np.zeros(n, dtype=dtype) for n in frame.sizes])

    @classmethod
    def from_flat(cls, frame: NeedletFrame, values) -> "CoefficientSet":
        values = np.asarray(values)
        cuts = np.cumsum([0] + frame.sizes)
        if values.shape[0] != cuts[-1]:
            raise ValueError("flat coefficient vector has the wrong length")
        return cls(frame.frame_hash, [values[a:b].copy() for a, b in zip(cuts[:-1], cuts[1:])])

    def to_json(self) -> str:
        def enc(v):
            if np.iscomplexobj(v):
                return [[float(z.real).hex(), float(z.imag).hex()] for z in v]
            return [float(z).hex() for z in v]

        body = {"frame_hash": self.frame_hash, "levels": [{"j": j, "values": enc(v)} for j, v in enumerate(self.levels)]}
        if self.meta:
            body["meta"] = self.meta
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "CoefficientSet":
        data = json.loads(text)
        levels = []
        for lev in sorted(data["levels"], key=lambda e: e["j"]):
            vals = lev["values"]
            if vals and isinstance(vals[0], list):
                levels.append(np.array([complex(float.fromhex(a), float.fromhex(b)) for a, b in vals]))
            else:
                levels.append(np.array([float.fromhex(a) for a in vals], dtype=float))
        return cls(data["frame_hash"], levels, data.get("meta", {}))


def eval_needlet(frame: NeedletFrame, j: int, xi_index: int, x, which: str = ANALYSIS):
    """``phi_xi(x)`` (analysis) or ``psi_xi(x)`` (synthesis) from the Gegenbauer kernel formula."""
    grid = frame.levels[j]
    xi = grid.points[xi_index]
    cut = frame.pair.a_hat if which == ANALYSIS else frame.pair.b_hat
    coeffs = band_coeffs(cut, j)
    return np.sqrt(grid.weights[xi_index]) * kernel_eval(frame.ball, coeffs, np.asarray(x, dtype=float), xi)


def needlet_values(frame: NeedletFrame, j: int, indices, points, which: str = SYNTHESIS) -> np.ndarray:
    """Matrix of needlet values ``[point, needlet]`` for level ``j`` via the spectral expansion."""
    indices = np.atleast_1d(indices)
    G = frame._basis[j][indices]
    m = frame.multipliers(j, which)
    cols = (m[None, :] * G * np.sqrt(frame.levels[j].weights[indices])[:, None]).T
    return frame.evaluate_expansion(cols, points)


def analyze(frame: NeedletFrame, f, fhat=None) -> CoefficientSet:
    """Coefficients ``<f, phi_xi> = int f conj(phi_xi) w`` for every needlet.

    ``f`` is a callable on point arrays or values on the analysis grid;
    precomputed basis coefficients may be passed as ``fhat``.
    """
    if fhat is None:
        fhat = frame.spectral_coefficients(f)
    levels = []
    for j, grid in enumerate(frame.levels):
        K = basis_size(frame.ball.d, 2**j)
        m = frame.multipliers(j, ANALYSIS)
        spec = np.conj(m) * fhat[:K]
        vals = np.sqrt(grid.weights) * (frame._basis[j] @ spec)
        levels.append(vals.real if np.isrealobj(spec) else vals)
    meta = {"aliasing_degree": frame.analysis_grid.exact_degree}
    return CoefficientSet(frame.frame_hash, levels, meta)


def synthesis_spectrum(frame: NeedletFrame, coeffs: CoefficientSet) -> np.ndarray:
    """Basis coefficients (on ``Pi_{2^J}``) of ``sum_xi c_xi psi_xi``."""
    if coeffs.frame_hash != frame.frame_hash:
        raise FrameMismatchError("coefficient set was produced by a different frame")
    total = np.zeros(basis_size(frame.ball.d, frame.degree), dtype=np.result_type(*coeffs.levels, float))
    for j, vals in enumerate(coeffs.levels):
        if not np.any(vals):
            continue
        K = basis_size(frame.ball.d, 2**j)
        m = frame.multipliers(j, SYNTHESIS)
        spec = m * ((np.sqrt(frame.levels[j].weights) * vals) @ frame._basis[j])
        total = total.astype(np.result_type(total, spec), copy=False)
        total[:K] += spec
    return total


def synthesize(frame: NeedletFrame, coeffs: CoefficientSet, points) -> np.ndarray:
    """``sum_xi c_xi psi_xi(x)`` at ``points``."""
    points = as_points(points, frame.ball.d)
    return frame.evaluate_expansion(synthesis_spectrum(frame, coeffs), np.atleast_2d(points))


def needlet_norms(frame: NeedletFrame, p: float, which: str = SYNTHESIS, levels=None) -> list:
    """``||psi_xi||_p`` for every needlet of the selected levels, by cubature on the analysis grid.

    ``p = 2`` uses the exact spectral identity ``||psi||_2^2 = lambda sum |b|^2 Q_k(xi)^2``.
    Otherwise ``||psi_xi||_p = lambda_xi^(1/2) ||Psi_j(., xi)||_p``, and for ``d = 2`` the
    kernel norm depends on ``|xi|`` only, so it is computed once per radius.
    """
    levels = range(frame.J + 1) if levels is None else levels
    out = []
    g = frame.analysis_grid
    for j in levels:
        lam = frame.levels[j].weights
        m = frame.multipliers(j, which)
        if p == 2:
            out.append(np.sqrt(lam * (np.abs(frame._basis[j]) ** 2 @ np.abs(m) ** 2)))
            continue
        pts = frame.levels[j].points
        if frame.ball.d == 2:
            _, rep, inverse = np.unique(np.round(np.linalg.norm(pts, axis=1), 12), return_index=True,
                                        return_inverse=True)
        else:
            rep, inverse = np.arange(len(pts)), np.arange(len(pts))
        B = frame._basis[j][rep]
        acc = np.zeros(rep.size)
        for s in range(0, len(g), 4096):
            Q = ball_basis(frame.ball, 2**j, g.points[s : s + 4096])
            vals = np.abs((Q * m[None, :]) @ B.T)
            if np.isinf(p):
                acc = np.maximum(acc, vals.max(axis=0))
            else:
                acc += g.weights[s : s + 4096] @ vals**p
        kern = acc if np.isinf(p) else acc ** (1.0 / p)
        out.append(np.sqrt(lam) * kern[inverse.ravel()])
    return out


def needlet_norm_profile(frame: NeedletFrame, j: int, p: float) -> np.ndarray:
    """The predicted size ``(2^(jd) / W(2^j; xi))^(1/2 - 1/p)`` of level-``j`` needlets."""
    ball = frame.ball
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    return (2.0 ** (j * ball.d) / weight_W(ball, 2.0**j, frame.levels[j].points)) ** (0.5 - inv_p)


def needlet_localization_report(frame: NeedletFrame, j: int, k: float, sample, which: str = ANALYSIS) -> dict:
    """Empirical constants of the needlet decay and lower bounds at level ``j``.

    ``c_k`` is ``max |phi_xi(x)| sqrt(W(2^j; x)) (1 + 2^j d(xi, x))^k / 2^(jd/2)`` over all
    level-``j`` needlets and sample points; ``diag`` is the same at ``x = xi``; ``lower`` is
    ``min_xi max_{B_xi(2^-j)} |phi_xi| / (2^(jd) / W(2^j; xi))^(1/2)`` over sampled balls.
    """
    ball = frame.ball
    sample = np.atleast_2d(sample)
    grid = frame.levels[j]
    n = 2.0**j
    idx = np.arange(len(grid))
    vals = np.abs(needlet_values(frame, j, idx, sample, which))  # [sample, needlet]
    dist = ball_distance(sample[:, None, :], grid.points[None, :, :])
    wx = np.sqrt(weight_W(ball, n, sample))[:, None]
    c_k = float(np.max(vals * wx * (1.0 + n * dist) ** k) / n ** (ball.d / 2))

    diag = np.abs(np.einsum("ii->i", needlet_values(frame, j, idx, grid.points, which)))
    wxi = weight_W(ball, n, grid.points)
    c_diag = float(np.max(diag * np.sqrt(wxi)) / n ** (ball.d / 2))
    # lower bound over the ball B_xi(2^-j), including the centre itself
    near = dist < 1.0 / n
    masked = np.where(near, vals, 0.0).max(axis=0)
    best = np.maximum(masked, diag)
    lower = float(np.min(best / np.sqrt(n**ball.d / wxi)))
    return {"level": j, "k": k, "c_k": c_k, "c_diag": c_diag, "lower": lower}


def frame_gram_diagonal(frame: NeedletFrame, j: int) -> np.ndarray:
    """``<psi_xi, phi_xi>`` for all level-``j`` needlets (exact, spectral)."""
    lam = frame.levels[j].weights
    ma = frame.multipliers(j, ANALYSIS)
    mb = frame.multipliers(j, SYNTHESIS)
    return lam * (frame._basis[j] ** 2 @ (np.conj(ma) * mb))


def kernel_needlet_matrix(frame: NeedletFrame, j: int, points, which: str = ANALYSIS) -> np.ndarray:
    """All level-``j`` needlets at ``points`` from the Gegenbauer kernel (reference route)."""
    grid = frame.levels[j]
    cut = frame.pair.a_hat if which == ANALYSIS else frame.pair.b_hat
    K = kernel_matrix(frame.ball, band_coeffs(cut, j), np.atleast_2d(points), grid.points)
    return K * np.sqrt(grid.weights)[None, :]


# sklearn-facing estimator -------------------------------------------------------------
from sklearn.base import BaseEstimator, TransformerMixin  # noqa: E402
from sklearn.utils.validation import check_is_fitted  # noqa: E402


class NeedletTransform(TransformerMixin, BaseEstimator):
    """Needlet analysis as a scikit-learn transformer.

    Each row of ``X`` holds one function sampled on ``analysis_nodes_``;
    :meth:`transform` returns the flattened coefficient vectors and
    :meth:`inverse_transform` maps them back to values on the same nodes.

    Parameters
    ----------
    dim : int
        Ball dimension (1 or 2).
    mu : float
        Weight exponent (``> 0``).
    levels : int
        Finest level ``J``.
    strategy : {"product", "quasi_uniform"}
        Grid construction.
    cutoff : str
        ``"self-dual"`` or ``"pair:<name>"``.
    analysis_oversample : int
        Extra dyadic levels of the analysis cubature.
    """

    def __init__(self, dim=2, mu=1.0, levels=3, strategy="product", cutoff="self-dual", analysis_oversample=2):
        self.dim = dim
        self.mu = mu
        self.levels = levels
        self.strategy = strategy
        self.cutoff = cutoff
        self.analysis_oversample = analysis_oversample

    def fit(self, X=None, y=None):
        if self.mu <= 0:
            raise ValueError("mu must be > 0 for needlet frames")
        self.frame_ = NeedletFrame.build(self.dim, self.mu, self.levels, self.strategy, self.cutoff,
                                         self.analysis_oversample)
        self.analysis_nodes_ = self.frame_.analysis_grid.points
        self.n_coefficients_ = int(sum(self.frame_.sizes))
        if X is not None:
            self._check_samples(X)
        return self

    def _check_samples(self, X):
        X = np.asarray(X)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != len(self.analysis_nodes_):
            raise ValueError(f"expected samples of shape (n_functions, {len(self.analysis_nodes_)})")
        if not np.all(np.isfinite(X)):
            raise ValueError("samples contain non-finite values")
        return X

    def transform(self, X):
        check_is_fitted(self, "frame_")
        X = self._check_samples(X)
        return np.vstack([analyze(self.frame_, row).flat() for row in X])

    def inverse_transform(self, X, points=None):
        check_is_fitted(self, "frame_")
        X = np.atleast_2d(np.asarray(X))
        pts = self.analysis_nodes_ if points is None else as_points(points, self.dim)
        return np.vstack([synthesize(self.frame_, CoefficientSet.from_flat(self.frame_, row), pts) for row in X])

    def sample(self, f):
        """Evaluate a callable on the analysis nodes, ready for :meth:`transform`."""
        check_is_fitted(self, "frame_")
        return np.asarray(f(self.analysis_nodes_))
