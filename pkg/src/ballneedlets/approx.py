"""Polynomial and nonlinear n-term approximation with needlets.

``best_poly_error`` uses ``||f - L_n * f||_p`` as a near-best surrogate of
``E_n(f)_p``.  ``greedy_nterm`` keeps the ``n`` terms ``<f,phi_xi> psi_xi``
with the largest ``L_p`` norms; its errors are reported as ``sigma_hat``,
an upper estimate of the true ``sigma_n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cutoffs import TYPE_A, make_bump_cutoff
from .kernels import lp_norm
from .needlets import (
    CoefficientSet,
    FrameMismatchError,
    NeedletFrame,
    needlet_norm_profile,
    needlet_norms,
    needlet_values,
    synthesis_spectrum,
)
from .orthopoly import ball_basis, basis_degrees


@dataclass
class ApproxRun:
    """Errors of an approximation sweep over ``n_values``."""

    frame_hash: str
    descriptor: str
    p: float
    n_values: list
    errors: list
    norm_btau: float = float("nan")
    extra: dict = field(default_factory=dict)

    def is_non_increasing(self, slack: float = 1e-12) -> bool:
        e = np.asarray(self.errors)
        return bool(np.all(np.diff(e) <= slack * max(1.0, float(np.max(e)))))


def lowpass_errors(frame: NeedletFrame, f, n_values, p: float) -> list:
    """``||f - L_n * f||_p`` for every ``n`` in ``n_values`` (type (a) cutoff)."""
    n_values = [int(n) for n in n_values]
    top = 2 * max(n_values)
    if top > frame.analysis_grid.exact_degree // 2:
        raise ValueError(f"analysis cubature (degree {frame.analysis_grid.exact_degree}) too coarse for L_{max(n_values)}")
    vals = frame.sample(f)
    fhat = frame.spectral_coefficients(vals, degree=top)
    deg = basis_degrees(frame.ball.d, top)
    cut = make_bump_cutoff(TYPE_A)
    mult = np.stack([cut(deg / n) for n in n_values], axis=1)  # (K, len(n_values))
    spec = mult * fhat[:, None]
    g = frame.analysis_grid
    approx = np.empty((len(g), len(n_values)), dtype=spec.dtype)
    for s in range(0, len(g), 8192):
        approx[s : s + 8192] = ball_basis(frame.ball, top, g.points[s : s + 8192]) @ spec
    return [lp_norm(vals - approx[:, i], g.weights, p) for i in range(len(n_values))]


def best_poly_error(frame: NeedletFrame, f, n: int, p: float) -> float:
    """Near-best surrogate ``||f - L_n * f||_p`` of ``E_n(f)_p``."""
    return lowpass_errors(frame, f, [n], p)[0]


def term_norms(frame: NeedletFrame, p: float) -> list:
    """``||psi_xi||_p`` for every needlet, cached on the frame."""
    cache = frame.__dict__.setdefault("_term_norms", {})
    if p not in cache:
        cache[p] = needlet_norms(frame, p)
    return cache[p]


@dataclass
class NTermResult:
    """Greedy selection: ranked keys and the truncated coefficient set."""

    keys: list
    coeffs: CoefficientSet
    scores: np.ndarray


def _ranking(frame: NeedletFrame, coeffs: CoefficientSet, p: float, candidates: int | None):
    """Order of all terms by ``|c_xi| ||psi_xi||_p`` (estimated first, exact for the leaders)."""
    if p == 2:
        exact = term_norms(frame, 2)
        score = np.concatenate([np.abs(h) * nrm for h, nrm in zip(coeffs.levels, exact)])
        return np.argsort(-score, kind="stable"), score
    est = np.concatenate([np.abs(h) * needlet_norm_profile(frame, j, p) for j, h in enumerate(coeffs.levels)])
    order = np.argsort(-est, kind="stable")
    if candidates is None:
        exact = term_norms(frame, p)
        score = np.concatenate([np.abs(h) * nrm for h, nrm in zip(coeffs.levels, exact)])
        return np.argsort(-score, kind="stable"), score
    lead = order[:candidates]
    cuts = np.cumsum([0] + frame.sizes)
    score = est.copy()
    level = np.searchsorted(cuts, lead, side="right") - 1
    for j in np.unique(level):
        sel = lead[level == j]
        idx = sel - cuts[j]
        vals = _exact_subset_norms(frame, j, idx, p)
        score[sel] = np.abs(coeffs.levels[j][idx]) * vals
    top = lead[np.argsort(-score[lead], kind="stable")]
    rest = order[candidates:]
    return np.concatenate([top, rest]), score


def _exact_subset_norms(frame: NeedletFrame, j: int, idx, p: float) -> np.ndarray:
    g = frame.analysis_grid
    acc = np.zeros(len(idx))
    for s in range(0, len(g), 4096):
        v = np.abs(needlet_values(frame, j, idx, g.points[s : s + 4096], which="synthesis"))
        if np.isinf(p):
            acc = np.maximum(acc, v.max(axis=0))
        else:
            acc += g.weights[s : s + 4096] @ v**p
    return acc if np.isinf(p) else acc ** (1.0 / p)


def greedy_nterm(frame: NeedletFrame, coeffs: CoefficientSet, n: int, p: float,
                 candidates: int | None = None) -> NTermResult:
    """Keep the ``n`` terms with the largest ``||c_xi psi_xi||_p``.

    For ``p != 2`` the ranking first uses the needlet-norm profile and then exact cubature
    norms for the leading ``candidates`` terms (all terms when ``candidates`` is ``None``).
    ``n`` larger than the coefficient count keeps everything.
    """
    if coeffs.frame_hash != frame.frame_hash:
        raise FrameMismatchError("coefficients belong to a different frame")
    order, score = _ranking(frame, coeffs, p, candidates)
    keep = order[: max(0, min(n, order.size))]
    flat = np.zeros_like(coeffs.flat())
    flat[keep] = coeffs.flat()[keep]
    kept = CoefficientSet.from_flat(frame, flat)
    cuts = np.cumsum([0] + frame.sizes)
    lev = np.searchsorted(cuts, keep, side="right") - 1
    keys = [(int(j), int(k - cuts[j])) for j, k in zip(lev, keep)]
    return NTermResult(keys, kept, score)


def _refit(frame: NeedletFrame, vals, keys) -> np.ndarray:
    """Least-squares coefficients on the selected needlets (weighted ``L_2`` on the analysis nodes)."""
    g = frame.analysis_grid
    cols = []
    for j in sorted({k[0] for k in keys}):
        idx = [k[1] for k in keys if k[0] == j]
        cols.append(needlet_values(frame, j, np.array(idx), g.points, which="synthesis"))
    A = np.hstack(cols) * np.sqrt(g.weights)[:, None]
    sol, *_ = np.linalg.lstsq(A, np.sqrt(g.weights) * vals, rcond=None)
    return A @ sol / np.sqrt(g.weights)


def nterm_errors(frame: NeedletFrame, f, coeffs: CoefficientSet, n_values, p: float, refit: bool = False,
                 candidates: int | None = None) -> list:
    """``sigma_hat_n = ||f - g_n||_p`` on the analysis nodes for each ``n`` (greedy, nested)."""
    vals = frame.sample(f)
    g = frame.analysis_grid
    order, _ = _ranking(frame, coeffs, p, candidates)
    out = []
    flat_all = coeffs.flat()
    for n in n_values:
        n = min(int(n), order.size)
        if n == 0:
            out.append(lp_norm(vals, g.weights, p))
            continue
        if refit:
            if p != 2:
                raise ValueError("least-squares refit is defined for p = 2")
            cuts = np.cumsum([0] + frame.sizes)
            keep = order[:n]
            lev = np.searchsorted(cuts, keep, side="right") - 1
            approx = _refit(frame, vals, [(int(j), int(k - cuts[j])) for j, k in zip(lev, keep)])
        else:
            flat = np.zeros_like(flat_all)
            flat[order[:n]] = flat_all[order[:n]]
            approx = frame.evaluate_expansion(synthesis_spectrum(frame, CoefficientSet.from_flat(frame, flat)), g.points)
        out.append(lp_norm(vals - approx, g.weights, p))
    return out


def jackson_diagnostic(frame: NeedletFrame, f, s: float, p: float, n_values, coeffs: CoefficientSet | None = None,
                       descriptor: str = "") -> ApproxRun:
    """Fitted log-log slope of ``sigma_hat_n`` and the empirical Jackson constants.

    ``extra`` holds ``slope``, ``intercept``, ``constants`` (``sigma_hat_n n^s / ||f||_{B_tau^s}``)
    and their max/min ``variation``.
    """
    from .needlets import analyze
    from .spaces import btau_norm

    coeffs = analyze(frame, f) if coeffs is None else coeffs
    sig = nterm_errors(frame, f, coeffs, n_values, p)
    norm = btau_norm(frame, coeffs, s, p)
    n_arr = np.asarray(n_values, dtype=float)
    slope, intercept = np.polyfit(np.log(n_arr), np.log(sig), 1)
    const = np.asarray(sig) * n_arr**s / norm
    return ApproxRun(frame.frame_hash, descriptor, p, list(map(int, n_values)), [float(v) for v in sig], float(norm),
                     {"slope": float(slope), "intercept": float(intercept), "constants": const.tolist(),
                      "variation": float(const.max() / const.min()), "s": s})
