"""Command-line entry point: frame construction, transforms, norms, n-term runs and verification.

Exit codes: 0 success, 1 verification failure, 2 configuration error, 3 numerical failure.
Structured outputs are JSON with hex-encoded reals and a provenance block; n-term curves are CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
from pathlib import Path

import numpy as np
import scipy
import sklearn
from threadpoolctl import threadpool_limits

from . import __version__
from .approx import jackson_diagnostic
from .functions import make_function
from .geometry import as_points
from .grids import PRODUCT, QUASI_UNIFORM
from .needlets import CoefficientSet, FrameMismatchError, NeedletFrame, analyze, synthesize
from .spaces import B_SPACE, F_SPACE, SpaceParams, b_norm_kernel, b_norm_sequence, f_norm_kernel, f_norm_sequence
from .verify import DEFAULT_SEED, SUITES, hex_encode, run_verify

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_STRATEGIES = {"product": PRODUCT, "quasi-uniform": QUASI_UNIFORM, "quasi_uniform": QUASI_UNIFORM}


class ConfigError(ValueError):
    """Invalid command-line configuration."""


# -- argument parsing ------------------------------------------------------------------
def _real(text: str) -> float:
    low = text.strip().lower()
    if low in ("inf", "infinity", "oo"):
        return float("inf")
    return float(text)


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _frame_flags(p: argparse.ArgumentParser, loadable: bool = True):
    g = p.add_argument_group("frame")
    if loadable:
        g.add_argument("--frame", type=Path, help="frame file written by 'frame build' (otherwise built from flags)")
    g.add_argument("--dim", type=int, default=2, help="ball dimension d (1 or 2)")
    g.add_argument("--mu", type=float, default=1.0, help="weight exponent mu > 0")
    g.add_argument("--levels", type=int, default=3, help="finest level J")
    g.add_argument("--strategy", choices=sorted(_STRATEGIES), default="product")
    g.add_argument("--cutoff", default="self-dual", help="'self-dual' or 'pair:<name>'")


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="64-bit seed for all randomness")
    p.add_argument("--threads", type=int, default=None, help="cap on BLAS threads")
    p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballneedlets", description="Weighted needlet frames on the unit ball.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    frame = sub.add_parser("frame", help="frame construction")
    fsub = frame.add_subparsers(dest="frame_command", required=True)
    build = fsub.add_parser("build", help="build and serialize a frame")
    _frame_flags(build, loadable=False)
    _common_flags(build)

    p = sub.add_parser("analyze", help="needlet coefficients of a test function")
    _frame_flags(p)
    p.add_argument("--function", required=True, help="test function descriptor, e.g. boundary_power:alpha=1.5")
    _common_flags(p)

    p = sub.add_parser("synthesize", help="evaluate a needlet expansion")
    _frame_flags(p)
    p.add_argument("--coefficients", type=Path, required=True, help="output of 'analyze'")
    p.add_argument("--points", type=Path, default=None, help="CSV of evaluation points (default: random sample)")
    p.add_argument("--n-points", type=int, default=64, help="size of the random sample when --points is absent")
    _common_flags(p)

    p = sub.add_parser("norms", help="kernel and sequence F/B norms")
    _frame_flags(p)
    p.add_argument("--function", action="append", required=True, help="test function descriptor (repeatable)")
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--p", type=_real, default=2.0)
    p.add_argument("--q", type=_real, default=2.0)
    p.add_argument("--family", choices=("F", "B", "both"), default="both")
    _common_flags(p)

    p = sub.add_parser("nterm", help="greedy n-term approximation curve (CSV)")
    _frame_flags(p)
    p.add_argument("--function", required=True)
    p.add_argument("--s", type=float, default=1.0, help="smoothness index of the B_tau^s normalisation")
    p.add_argument("--p", type=_real, default=2.0)
    p.add_argument("--n-values", type=_int_list, default=[16, 32, 64, 128, 256])
    _common_flags(p)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), help="suite to run (repeatable; default all)")
    p.add_argument("--json", action="store_true", help="emit the structured report")
    _common_flags(p)
    return parser


# -- helpers -------------------------------------------------------------------------------
def _config(args, frame: NeedletFrame | None) -> dict:
    skip = {"out", "threads", "frame_command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    if frame is not None:
        # echo the frame actually used, which may come from a file rather than the flags
        out.update(dim=frame.ball.d, mu=frame.ball.mu, levels=frame.J, strategy=frame.strategy,
                   cutoff=frame.cutoff_spec)
    return hex_encode(out)


def provenance(args, frame: NeedletFrame | None = None) -> dict:
    """Config echo, frame hash and library versions (no timestamps, so reruns are byte-identical)."""
    return {
        "config": _config(args, frame),
        "frame_hash": frame.frame_hash if frame is not None else None,
        "versions": {"ballneedlets": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "scikit-learn": sklearn.__version__, "python": platform.python_version()},
    }


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _emit(args, text: str):
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)


def _frame(args) -> NeedletFrame:
    path = getattr(args, "frame", None)
    if path is not None:
        return NeedletFrame.from_json(path.read_text())
    if args.mu <= 0:
        raise ConfigError(f"mu must be > 0 for needlet frames (unsupported-mu), got {args.mu}")
    if args.levels < 0:
        raise ConfigError("--levels must be >= 0")
    return NeedletFrame.build(args.dim, args.mu, args.levels, _STRATEGIES[args.strategy], args.cutoff)


def _read_points(path: Path, d: int) -> np.ndarray:
    pts = np.loadtxt(path, delimiter=",", ndmin=2)
    if pts.shape[1] != d:
        raise ConfigError(f"points file has {pts.shape[1]} columns, frame dimension is {d}")
    if np.any(np.linalg.norm(pts, axis=1) > 1 + 1e-12):
        raise ConfigError("evaluation points must lie in the closed unit ball")
    return as_points(pts, d)


def _random_points(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    x = rng.standard_normal((count, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rng.uniform(0, 1, size=(count, 1)) ** (1.0 / d)


# -- commands ------------------------------------------------------------------------------
def cmd_frame_build(args) -> int:
    frame = _frame(args)
    _emit(args, frame.to_json())
    return EXIT_OK


def cmd_analyze(args) -> int:
    frame = _frame(args)
    f = make_function(args.function, frame.ball)
    coeffs = analyze(frame, f)
    coeffs.meta = {"function": f.descriptor}
    body = {"provenance": provenance(args, frame), "function": f.descriptor,
            "coefficients": json.loads(coeffs.to_json())}
    _emit(args, _dump(body))
    return EXIT_OK


def cmd_synthesize(args) -> int:
    frame = _frame(args)
    data = json.loads(args.coefficients.read_text())
    coeffs = CoefficientSet.from_json(json.dumps(data.get("coefficients", data)))
    if coeffs.frame_hash != frame.frame_hash:
        raise FrameMismatchError("coefficients were computed on a different frame (hash mismatch)")
    if args.points is not None:
        pts = _read_points(args.points, frame.ball.d)
    else:
        pts = _random_points(np.random.default_rng(args.seed), args.n_points, frame.ball.d)
    vals = synthesize(frame, coeffs, pts)
    body = {"provenance": provenance(args, frame), "points": hex_encode(pts), "values": hex_encode(np.real(vals))}
    if np.iscomplexobj(vals):
        body["values_imag"] = hex_encode(np.imag(vals))
    _emit(args, _dump(body))
    return EXIT_OK


def cmd_norms(args) -> int:
    frame = _frame(args)
    families = (F_SPACE, B_SPACE) if args.family == "both" else (args.family,)
    results = []
    for desc in args.function:
        f = make_function(desc, frame.ball)
        coeffs = analyze(frame, f)
        for fam in families:
            prm = SpaceParams(args.s, args.rho, args.p, args.q, fam)
            if fam == F_SPACE:
                kern, seq = f_norm_kernel(frame, f, prm), f_norm_sequence(frame, coeffs, prm)
            else:
                kern, seq = b_norm_kernel(frame, f, prm), b_norm_sequence(frame, coeffs, prm)
            results.append({"function": f.descriptor,
                            "params": hex_encode({"family": fam, "s": args.s, "rho": args.rho, "p": args.p,
                                                  "q": args.q}),
                            "kernel_norm": hex_encode(kern), "sequence_norm": hex_encode(seq),
                            "ratio": hex_encode(kern / seq if seq else float("nan"))})
    _emit(args, _dump({"provenance": provenance(args, frame), "results": results}))
    return EXIT_OK


def cmd_nterm(args) -> int:
    frame = _frame(args)
    f = make_function(args.function, frame.ball)
    if any(n < 0 for n in args.n_values):
        raise ConfigError("--n-values must be non-negative")
    n_values = [n for n in args.n_values if n > 0]
    run = jackson_diagnostic(frame, f, args.s, args.p, n_values, descriptor=f.descriptor)
    buf = io.StringIO()
    buf.write(f"# frame_hash={frame.frame_hash} function={f.descriptor} s={args.s!r} p={args.p!r} "
              f"norm_Btau={run.norm_btau!r} slope={run.extra['slope']!r}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "sigma_hat", "scaled_sigma_hat"])
    for n, e, c in zip(run.n_values, run.errors, run.extra["constants"]):
        w.writerow([n, repr(float(e)), repr(float(c))])
    _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    log = None if args.json else (lambda line: print(line, flush=True))
    report = run_verify(args.suite, seed=args.seed, log=log if args.out is None else None)
    if args.json:
        body = report.to_dict()
        body["provenance"] = provenance(args)
        _emit(args, _dump(body))
    elif args.out is not None:
        _emit(args, "".join(r.line() + "\n" for r in report.results))
    return EXIT_OK if report.passed else EXIT_VERIFY


_COMMANDS = {"analyze": cmd_analyze, "synthesize": cmd_synthesize, "norms": cmd_norms, "nterm": cmd_nterm,
             "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    handler = cmd_frame_build if args.command == "frame" else _COMMANDS[args.command]
    try:
        with threadpool_limits(limits=args.threads):
            return handler(args)
    except NotImplementedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, OSError) as exc:
        # includes unsupported mu, unknown families, hash mismatches and unreadable files
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
