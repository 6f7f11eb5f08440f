"""Verification suites: numerical checks of the frame's defining properties.

Each check returns a :class:`CheckResult` with the measured constants and the
limit it was held to.  Suites are shared by the ``verify`` command and the
test-suite.  All randomness derives from one seed, so reports are
reproducible bit for bit.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .approx import jackson_diagnostic
from .cutoffs import TYPE_A, TYPE_B, make_bump_cutoff, make_pair, partition_of_unity_error
from .functions import make_function, random_coefficients
from .geometry import WeightedBall, weight_W
from .grids import (
    PRODUCT,
    QUASI_UNIFORM,
    build_grid,
    cell_diameters,
    cell_equivalence_band,
    moment_oracle,
    power_moment,
    weight_equivalence_band,
)
from .kernels import kernel_matrix, localization_constant, lowpass_coeffs, lp_norm, nikolskii_check
from .needlets import (
    NeedletFrame,
    analyze,
    needlet_localization_report,
    needlet_norm_profile,
    needlet_norms,
    synthesis_spectrum,
)
from .orthopoly import ball_basis, basis_degrees, basis_size
from .spaces import (
    B_SPACE,
    F_SPACE,
    MaximalSampler,
    SpaceParams,
    b_norm_sequence,
    f_norm_sequence,
    indicator_bounds,
    level_blocks,
)

DEFAULT_SEED = 20240607
DESK_MUS = (0.5, 1.0, 2.0)


@dataclass
class CheckResult:
    """Outcome of one check: pass flag, measured constants and the limit applied."""

    name: str
    passed: bool
    measured: dict
    limit: str
    criterion: int | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "criterion": self.criterion, "passed": bool(self.passed),
                "limit": self.limit, "measured": hex_encode(self.measured)}

    def line(self) -> str:
        tag = f"[{self.criterion}] " if self.criterion else ""
        body = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'} {tag}{self.name}: {body} (limit: {self.limit})"


@dataclass
class Report:
    seed: int
    results: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self, timings: bool = False) -> dict:
        body = {"seed": self.seed, "passed": self.passed, "checks": [r.to_dict() for r in self.results]}
        if timings:
            body["timings"] = {k: round(v, 1) for k, v in self.timings.items()}
        return body

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=1)


def hex_encode(v):
    # hex floats keep reports bit-exact
    if isinstance(v, dict):
        return {str(k): hex_encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [hex_encode(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v).hex()
    return v


def _short(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.3g}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_short(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _band(values) -> float:
    v = np.abs(np.asarray(values, dtype=float)).ravel()
    return float(v.max() / v.min())


_FRAMES: dict = {}


def cached_frame(d: int, mu: float, J: int, strategy: str = PRODUCT, cutoff: str = "self-dual") -> NeedletFrame:
    """Frames are deterministic, so suites share them within a process."""
    key = (d, float(mu), J, strategy, cutoff)
    if key not in _FRAMES:
        _FRAMES[key] = NeedletFrame.build(d, mu, J, strategy, cutoff)
    return _FRAMES[key]


def _rng(seed: int, stream: str) -> np.random.Generator:
    return np.random.default_rng([seed, *stream.encode()])


def _ball_sample(rng, count: int, boundary_share: float = 0.25) -> np.ndarray:
    # uniform by area, plus a share with |x| in [0.9, 1)
    n_b = int(count * boundary_share)
    r = np.sqrt(rng.uniform(0, 1, count - n_b))
    r = np.concatenate([r, rng.uniform(0.9, 1.0, n_b)])
    th = rng.uniform(0, 2 * np.pi, count)
    return np.column_stack([r * np.cos(th), r * np.sin(th)])


# -- cutoffs ---------------------------------------------------------------------------
def check_partition_of_unity(seed: int) -> list:
    rng = _rng(seed, "pou")
    t = np.concatenate([rng.uniform(1.0, 2.0**6, 10**5 - 7), 2.0 ** np.arange(7)])
    out = []
    for spec in ("self-dual", "pair:bump", "pair:complex"):
        err = float(np.max(partition_of_unity_error(make_pair(spec), t)))
        out.append(CheckResult(f"partition of unity ({spec})", err <= 1e-12, {"sup_error": err}, "<= 1e-12", 3))
    return out


def check_cutoff_shape() -> list:
    a, b = make_bump_cutoff(TYPE_A), make_bump_cutoff(TYPE_B)
    t = np.linspace(0, 3, 30001)
    va, vb = a(t), b(t)
    ok_a = np.all(va[t <= 1] == 1) and np.all(va[t >= 2] == 0) and np.all((va >= 0) & (va <= 1))
    ok_b = np.all(vb[(t <= 0.5) | (t >= 2)] == 0) and np.all((vb >= 0) & (vb <= 1))
    floors = {c.name: c.floor for c in (a, b, make_pair("pair:bump").a_hat, make_pair("pair:complex").a_hat)}
    # difference quotients up to order 4 on a 1e4-point grid as a smoothness proxy; the
    # type (b) transition on [1/2, 1] forces larger values, so those are only recorded
    s = np.linspace(0, 3, 10000)
    h = s[1] - s[0]
    d4 = {c.name: float(np.max(np.abs(np.diff(c(s), 4)))) / h**4
          for c in (a, b, make_pair("pair:bump").a_hat, make_pair("pair:complex").a_hat)}
    lower = {c.name: max(float(np.max(np.abs(np.diff(c(s), k)))) / h**k for k in (1, 2, 3)) for c in (a, b)}
    ok = d4[a.name] <= 1e4 and lower[a.name] <= 1e4
    return [
        CheckResult("cutoff supports and plateaus", bool(ok_a and ok_b), {"type_a": bool(ok_a), "type_b": bool(ok_b)},
                    "exact zeros/ones"),
        CheckResult("cutoff floor on [3/5, 5/3]", min(floors.values()) > 0, floors, "> 0 (recorded)"),
        CheckResult("cutoff difference quotients", ok, {"order4": d4, "order1to3": lower},
                    "type (a) <= 1e4; type (b) recorded"),
    ]


# -- kernels ---------------------------------------------------------------------------
def check_reproducing(seed: int, mus=DESK_MUS) -> list:
    rng = _rng(seed, "repro")
    cut = make_bump_cutoff(TYPE_A)
    out = []
    for mu in mus:
        ball = WeightedBall(2, mu)
        worst = {}
        for n in (4, 8, 16, 32):
            nodes = build_grid(ball, 0, degree=3 * n)
            x = _ball_sample(rng, 200)
            C = np.stack([random_coefficients(2, n, rng) for _ in range(20)], axis=1)
            g_nodes = ball_basis(ball, n, nodes.points) @ C
            g_x = ball_basis(ball, n, x) @ C
            conv = kernel_matrix(ball, lowpass_coeffs(cut, n), x, nodes.points) @ (nodes.weights[:, None] * g_nodes)
            sup = np.maximum(np.abs(g_nodes).max(axis=0), np.abs(g_x).max(axis=0))
            worst[n] = float(np.max(np.abs(conv - g_x).max(axis=0) / sup))
        m = max(worst.values())
        out.append(CheckResult(f"reproducing kernel L_n (mu={mu})", m <= 1e-10, {"rel_error": worst}, "<= 1e-10", 1))
    return out


def check_kernel_localization(seed: int, mus=DESK_MUS) -> list:
    rng = _rng(seed, "loc")
    cut = make_bump_cutoff(TYPE_A)
    y = _ball_sample(rng, 2000)
    x = y[rng.choice(len(y), 200, replace=False)]
    out = []
    for mu in mus:
        ball = WeightedBall(2, mu)
        c = {n: localization_constant(ball, cut, n, 6, x, y) for n in (16, 32, 64)}
        v = _band(list(c.values()))
        out.append(CheckResult(f"L_n localization c_6 (mu={mu})", v <= 4, {"c6": c, "variation": v}, "variation <= 4", 5))
    return out


def check_kernel_lp_bounds(mus=DESK_MUS) -> list:
    cut = make_bump_cutoff(TYPE_A)
    radii = np.array([0.0, 0.25, 0.5, 0.75, 0.9, 0.99])
    x = np.column_stack([radii, np.zeros_like(radii)])
    ns = (8, 16, 32, 64)
    out = []
    for mu in mus:
        ball = WeightedBall(2, mu)
        top = 2 * max(ns)
        deg = basis_degrees(2, top)
        Qx = ball_basis(ball, top, x)  # (len(x), K)
        cols = np.concatenate([cut(deg / n)[:, None] * Qx.T for n in ns], axis=1)  # (K, len(ns) * len(x))
        grid = build_grid(ball, 0, degree=4 * top)
        l1 = np.zeros(cols.shape[1])
        sup = np.abs(np.sum(cols * np.tile(Qx.T, (1, len(ns))), axis=0))  # value at y = x
        for s in range(0, len(grid), 4096):
            v = np.abs(ball_basis(ball, top, grid.points[s : s + 4096]) @ cols)
            l1 += grid.weights[s : s + 4096] @ v
            sup = np.maximum(sup, v.max(axis=0))
        l2 = np.sqrt(np.sum(cols**2, axis=0))
        n_col = np.repeat(np.array(ns, float), len(x))
        W = weight_W(ball, n_col, np.tile(x, (len(ns), 1)))
        base = n_col**2 / W
        bands = {}
        for p, val in ((1, l1), (2, l2), (np.inf, sup)):
            inv = 0.0 if np.isinf(p) else 1.0 / p
            bands[str(p)] = _band(val / base ** (1 - inv))
        m = max(bands.values())
        out.append(CheckResult(f"kernel L_p norm bounds (mu={mu})", m <= 20, {"band": bands}, "max/min <= 20", 6))
    return out


def check_nikolskii(seed: int, mus=DESK_MUS) -> list:
    rng = _rng(seed, "nik")
    pairs = ((np.inf, 2.0), (np.inf, 1.0), (4.0, 2.0), (2.0, 1.0))
    ns = (4, 8, 16, 32)
    out = []
    for mu in mus:
        ball = WeightedBall(2, mu)
        grid = build_grid(ball, 0, degree=8 * max(ns))
        stats = {}
        for n in ns:
            C = np.stack([random_coefficients(2, n, rng) for _ in range(50)], axis=1)
            vals = np.vstack([ball_basis(ball, n, grid.points[s : s + 8192]) @ C for s in range(0, len(grid), 8192)])
            for p, q in pairs:
                r = [nikolskii_check(ball, n, vals[:, i], grid.weights, p, q) for i in range(C.shape[1])]
                stats.setdefault(f"{p}-{q}", []).append(float(np.max(r)))
        worst = max(max(v) for v in stats.values())
        slopes = {k: float(np.polyfit(np.log(ns), np.log(v), 1)[0]) for k, v in stats.items()}
        ok = worst <= 20 and max(slopes.values()) <= 0.1
        out.append(CheckResult(f"Nikolskii ratios (mu={mu})", ok, {"max_ratio": stats, "loglog_slope": slopes},
                               "max <= 20 and slope in n <= 0.1", 11))
    return out


# -- cubature --------------------------------------------------------------------------
def check_cubature(seed: int, mus=DESK_MUS, strategy: str = PRODUCT, levels=range(6)) -> list:
    rng = _rng(seed, f"cub-{strategy}")
    out = []
    for mu in mus:
        ball = WeightedBall(2, mu)
        worst, mass_err, positive = 0.0, 0.0, True
        for j in levels:
            g = cached_frame(2, mu, 5, strategy).levels[j] if j <= 5 else build_grid(ball, j, strategy)
            D = 2 ** (j + 2)
            positive &= bool(np.all(g.weights > 0))
            mass_err = max(mass_err, abs(g.weights.sum() - ball.total_mass))
            for _ in range(25):
                a = rng.standard_normal(2)
                a *= rng.uniform(0.2, 0.9) / np.linalg.norm(a)
                b = rng.uniform(0.2, 1.0)
                exact = power_moment(ball, a, b, D)
                worst = max(worst, abs(g.weights @ (g.points @ a + b) ** D - exact) / abs(exact))
            for _ in range(25):
                first = rng.integers(0, D // 2 + 1, size=8)
                al = 2 * np.stack([first, rng.integers(0, D // 2 - first + 1)], axis=1)
                coef = rng.standard_normal(len(al))
                mono = np.stack([np.prod(g.points**a, axis=1) for a in al], axis=1)
                ex = np.array([moment_oracle(ball, a) for a in al])
                worst = max(worst, abs(g.weights @ mono @ coef - ex @ coef) / (np.abs(coef) @ ex))
        ok = worst <= 1e-9 and mass_err <= 1e-10 and positive
        out.append(CheckResult(f"cubature exactness ({strategy}, mu={mu})", ok,
                               {"rel_error": worst, "mass_error": mass_err, "positive": positive},
                               "rel <= 1e-9, mass <= 1e-10, weights > 0", 2))
    return out


def check_grid_geometry(mus=DESK_MUS) -> list:
    out = []
    for mu in mus:
        fr = cached_frame(2, mu, 5, QUASI_UNIFORM)
        bands = {j: _band(cell_equivalence_band(g)) for j, g in enumerate(fr.levels)}
        wb = {j: _band(weight_equivalence_band(g)) for j, g in enumerate(fr.levels)}
        diam = {j: float(cell_diameters(g).max() * 2**j) for j, g in enumerate(fr.levels) if j <= 4}
        # equivalence is asymptotic: coarse levels are recorded, levels from 3 on are asserted
        fine = [j for j in bands if j >= 3]
        ok = (max(bands[j] for j in fine) <= 50 and max(wb[j] for j in fine) <= 50
              and _band([diam[j] for j in diam if j >= 2]) <= 4)
        out.append(CheckResult(f"quasi-uniform cells (mu={mu})", ok,
                               {"cell_band": bands, "weight_band": wb, "diameter_x_2^j": diam},
                               "bands <= 50 for j >= 3, diameter constant stable within 4"))
    return out


# -- frame -----------------------------------------------------------------------------
def check_reconstruction(seed: int, mus=DESK_MUS, J: int = 5) -> list:
    rng = _rng(seed, "recon")
    out = []
    runs = [(mu, PRODUCT, c) for mu in mus for c in ("self-dual", "pair:bump", "pair:complex")]
    runs += [(mu, QUASI_UNIFORM, "self-dual") for mu in mus]
    for mu, strategy, cut in runs:
        fr = cached_frame(2, mu, J, strategy, cut)
        m = 2 ** (J - 2)
        errs = []
        for _ in range(5):
            c = random_coefficients(2, m, rng)
            fhat = np.zeros(basis_size(2, fr.degree))
            fhat[: c.size] = c
            rec = synthesis_spectrum(fr, analyze(fr, None, fhat=fhat))
            errs.append(float(np.linalg.norm(rec - fhat) / np.linalg.norm(fhat)))
        e = max(errs)
        out.append(CheckResult(f"frame reconstruction ({strategy}, {cut}, mu={mu})", e <= 1e-8,
                               {"rel_L2_error": e}, "<= 1e-8", 4))
    return out


def check_reconstruction_pointwise(seed: int, mu: float = 1.0, J: int = 4) -> CheckResult:
    """Synthesis through the Gegenbauer kernel route at random points."""
    from .needlets import kernel_needlet_matrix

    rng = _rng(seed, "recon-pt")
    fr = cached_frame(2, mu, J)
    ball = fr.ball
    c = random_coefficients(2, 2 ** (J - 2), rng)
    x = _ball_sample(rng, 40)
    g_x = ball_basis(ball, 2 ** (J - 2), x) @ c
    fhat = np.zeros(basis_size(2, fr.degree))
    fhat[: c.size] = c
    co = analyze(fr, None, fhat=fhat)
    val = sum(kernel_needlet_matrix(fr, j, x, which="synthesis") @ co.levels[j] for j in range(J + 1))
    e = float(np.max(np.abs(val - g_x)) / np.max(np.abs(g_x)))
    return CheckResult("reconstruction via kernel route", e <= 1e-9, {"rel_max_error": e}, "<= 1e-9")


def check_needlet_norms(mus=DESK_MUS, strategy: str = QUASI_UNIFORM, J: int = 5) -> list:
    out = []
    for mu in mus:
        fr = cached_frame(2, mu, J, strategy)
        bands = {}
        for p in (1.0, 2.0, np.inf):
            nrm = needlet_norms(fr, p, levels=range(2, J + 1))
            ratio = np.concatenate([v / needlet_norm_profile(fr, j, p) for j, v in zip(range(2, J + 1), nrm)])
            bands[str(p)] = _band(ratio)
        m = max(bands.values())
        out.append(CheckResult(f"needlet norms ({strategy}, mu={mu})", m <= 20, {"band": bands},
                               "max/min <= 20", 8))
    return out


def check_needlet_localization(seed: int, mus=DESK_MUS, J: int = 5) -> list:
    rng = _rng(seed, "nloc")
    sample = _ball_sample(rng, 1200)
    out = []
    for mu in mus:
        fr = cached_frame(2, mu, J)
        c = {}
        for j in (3, 4, 5):
            c[j] = needlet_localization_report(fr, j, 6, sample)["c_k"]
        v = _band(list(c.values()))
        out.append(CheckResult(f"needlet localization c_6 (mu={mu})", v <= 4, {"c6": c, "variation": v},
                               "variation <= 4", 5))
    return out


def check_parseval(seed: int, mu: float = 1.0, J: int = 5) -> CheckResult:
    rng = _rng(seed, "parseval")
    fr = cached_frame(2, mu, J)
    r = []
    for _ in range(20):
        c = random_coefficients(2, 2 ** (J - 1), rng)
        fhat = np.zeros(basis_size(2, fr.degree))
        fhat[: c.size] = c
        co = analyze(fr, None, fhat=fhat)
        r.append(float(np.sum(np.abs(co.flat()) ** 2) / np.sum(c**2)))
    v = _band(r)
    return CheckResult("Parseval surrogate", v <= 10, {"min": min(r), "max": max(r), "band": v}, "max/min <= 10")


# -- spaces ----------------------------------------------------------------------------
def _spanning_functions(rng, fr: NeedletFrame, count: int = 20) -> list:
    top = 2 ** (fr.J - 1)
    deg = basis_degrees(2, top)
    out = []
    for _ in range(count):
        m = int(2 ** rng.integers(1, fr.J))
        decay = rng.uniform(0.0, 2.0)
        c = random_coefficients(2, top, rng) * (1.0 + deg) ** -decay * (deg <= m)
        fhat = np.zeros(basis_size(2, fr.degree))
        fhat[: c.size] = c
        out.append(fhat)
    return out


SPACE_GRID = [(s, rho, p, q) for (s, rho) in ((0, 0), (1, 1), (1, 0)) for p in (1.5, 2.0, 4.0)
              for q in (1.0, 2.0, np.inf)]


def check_norm_equivalence(seed: int, mus=DESK_MUS, J: int = 5) -> list:
    rng = _rng(seed, "spaces")
    out = []
    for mu in mus:
        fr = cached_frame(2, mu, J)
        alt = make_pair("pair:bump")
        funcs = _spanning_functions(rng, fr)
        coeffs = [analyze(fr, None, fhat=f) for f in funcs]
        blocks = [level_blocks(fr, fhat=f) for f in funcs]
        alt_blocks = [level_blocks(fr, fhat=f, pair=alt) for f in funcs]
        worst_eq, worst_ind = 0.0, 1.0
        per_point = {}
        for s, rho, p, q in SPACE_GRID:
            for fam in (F_SPACE, B_SPACE):
                prm = SpaceParams(s, rho, p, q, fam)
                if fam == F_SPACE:
                    ker = [_f_from_blocks(fr, b, prm) for b in blocks]
                    alt_k = [_f_from_blocks(fr, b, prm) for b in alt_blocks]
                    seq = [f_norm_sequence(fr, c, prm) for c in coeffs]
                else:
                    ker = [_b_from_blocks(fr, b, prm) for b in blocks]
                    alt_k = [_b_from_blocks(fr, b, prm) for b in alt_blocks]
                    seq = [b_norm_sequence(fr, c, prm) for c in coeffs]
                band = _band(np.array(ker) / np.array(seq))
                ind = float(np.max(np.maximum(np.array(ker) / alt_k, np.array(alt_k) / ker)))
                per_point[f"{fam}({s},{rho},{p},{q})"] = band
                worst_eq, worst_ind = max(worst_eq, band), max(worst_ind, ind)
        ok = worst_eq <= 100 and worst_ind <= 10
        out.append(CheckResult(f"norm equivalence (mu={mu})", ok,
                               {"worst_band": worst_eq, "cutoff_ratio": worst_ind,
                                "worst_point": max(per_point, key=per_point.get)},
                               "band <= 100 per point, cutoff ratio <= 10", 7))
    return out


def _f_from_blocks(fr, blocks, prm):
    from .spaces import _level_weights, _lq

    g = fr.analysis_grid
    b = np.abs(blocks) * _level_weights(fr, prm, g.points)
    return lp_norm(_lq(b, prm.q), g.weights, prm.p)


def _b_from_blocks(fr, blocks, prm):
    from .spaces import _level_weights, _lq

    g = fr.analysis_grid
    b = np.abs(blocks) * _level_weights(fr, prm, g.points)
    return float(_lq(np.array([lp_norm(r, g.weights, prm.p) for r in b]), prm.q))


# -- maximal operator ------------------------------------------------------------------
def check_maximal(seed: int, mus=DESK_MUS, cases: int = 100) -> list:
    rng = _rng(seed, "maximal")
    out = []
    for mu in mus:
        ball = WeightedBall(2, mu)
        sampler = MaximalSampler.build(ball, n_phi=200)
        lows, ups = [], []
        for i in range(cases):
            xi = _ball_sample(rng, 1, boundary_share=float(i % 4 == 0))[0]
            r = float(np.exp(rng.uniform(np.log(0.08), np.log(0.6))))
            x = _ball_sample(rng, 1, boundary_share=float(i % 3 == 0))[0]
            t = (1.0, 2.0)[i % 2]
            res = indicator_bounds(ball, xi, r, x, t, sampler)
            lows.append(res["lower"])
            ups.append(res["upper"])
        lo, hi = float(min(lows)), float(max(ups))
        ok = lo >= 0.05 and hi <= 20
        out.append(CheckResult(f"maximal indicator bounds (mu={mu})", ok, {"c_lower": lo, "c_upper": hi},
                               "c_lower >= 0.05, c_upper <= 20", 9))
    return out


# -- approximation ---------------------------------------------------------------------
JACKSON_S = 1.4


def regularity_index(alpha: float, d: int, p: float) -> float:
    """Besov index below which ``(1 - |x|^2)^alpha`` has finite ``B_tau^s`` norm.

    The singularity sits on the boundary sphere, of codimension one; counting
    the needlets it touches gives ``s < d (2 alpha + 1/p) / (d - 1)``.  For
    ``d = 1`` the singular set is two points and the index is unbounded.
    """
    if d == 1:
        return float("inf")
    return d * (2 * alpha + 1.0 / p) / (d - 1)


def check_jackson(mu: float = 1.0, J: int = 5, s: float = JACKSON_S) -> list:
    fr = cached_frame(2, mu, J)
    ns = [2**k for k in range(4, 11)]
    out = []
    for alpha in (0.75, 1.5):
        f = make_function(f"boundary_power:alpha={alpha}", fr.ball)
        run = jackson_diagnostic(fr, f, s, 2.0, ns, descriptor=f.descriptor)
        slope, var = run.extra["slope"], run.extra["variation"]
        ok = s < regularity_index(alpha, 2, 2.0) and slope <= -s + 0.2 and var <= 4 and run.is_non_increasing()
        out.append(CheckResult(f"Jackson diagnostic (alpha={alpha}, s={s})", ok,
                               {"slope": slope, "constant_variation": var, "norm_Btau": run.norm_btau,
                                "regularity_index": regularity_index(alpha, 2, 2.0)},
                               "slope <= -s + 0.2, variation <= 4", 10))
    return out


# -- suites ----------------------------------------------------------------------------
SUITES = {
    "cutoffs": lambda seed: check_partition_of_unity(seed) + check_cutoff_shape(),
    "kernels": lambda seed: (check_reproducing(seed) + check_kernel_localization(seed)
                             + check_kernel_lp_bounds() + check_nikolskii(seed)),
    "cubature": lambda seed: (check_cubature(seed) + check_cubature(seed, strategy=QUASI_UNIFORM)
                              + check_grid_geometry()),
    "frame": lambda seed: (check_reconstruction(seed) + [check_reconstruction_pointwise(seed), check_parseval(seed)]
                           + check_needlet_norms() + check_needlet_localization(seed)),
    "spaces": lambda seed: check_norm_equivalence(seed),
    "maximal": lambda seed: check_maximal(seed),
    "approx": lambda seed: check_jackson(),
}


def run_verify(suites=None, seed: int = DEFAULT_SEED, log=None) -> Report:
    """Run the named suites (all by default) and collect their results."""
    names = list(SUITES) if not suites else list(suites)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    report = Report(seed)
    for name in names:
        t0 = time.perf_counter()
        res = SUITES[name](seed)
        report.timings[name] = time.perf_counter() - t0
        report.results.extend(res)
        if log:
            for r in res:
                log(r.line())
    return report
