"""Command-line front end: ``nibb-max {cdf,verify,simulate,compare,matrix}``.

Exit codes: 0 success, 1 failed check or comparison, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactcheck, fredholm, kernels, montecarlo, serialize

THRESHOLDS = {"theorem1": 0.02, "corollary1-smallp": 0.03, "nibm-loe": 0.03, "prop2-selfcheck": 0.02}


class UsageError(Exception):
    """Invalid parameter combination detected after argument parsing."""


# --------------------------------------------------------------------------
# argument types
# --------------------------------------------------------------------------


def _grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be min:max:points, got {text!r}") from None
    if n < 2 or not hi > lo:
        raise argparse.ArgumentTypeError(f"grid needs points >= 2 and max > min, got {text!r}")
    return np.linspace(lo, hi, n)


def _rational(text: str) -> Fraction:
    try:
        return exactcheck.parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"malformed rational {text!r}: {exc}") from None


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _emit(obj, args) -> None:
    fmt = args.format
    if args.output:
        path = serialize.write(obj, args.output, fmt)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(serialize.dumps(obj, fmt or "csv"))


def _emit_report(report: dict, args) -> None:
    text = json.dumps(report, indent=1, default=str)
    if args.output:
        path = serialize.resolve_output(args.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
        print(f"wrote {path}", file=sys.stderr)
    else:
        print(text)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_cdf(args) -> int:
    if args.model == "restricted-max":
        _require(args.N >= 1, "--N must be >= 1")
        _require(0.0 < args.p < 1.0, "--p must lie in (0, 1)")
        grid = args.grid if args.grid is not None else fredholm.default_grid("restricted-max", N=args.N, p=args.p)
        _require(grid[0] >= 0, "grid must start at r >= 0")
        curve = fredholm.restricted_max_curve(args.N, args.p, grid)
    elif args.model == "limit":
        _require(args.N >= 1, "--N must be >= 1")
        grid = args.grid if args.grid is not None else fredholm.default_grid("limit", N=args.N)
        _require(grid[0] >= 0, "grid must start at x >= 0")
        curve = fredholm.limit_curve(args.N, grid, args.method)
    else:
        _require(args.m >= 1, "--m must be >= 1")
        _require(args.a > -1, "--a must be > -1")
        grid = args.grid if args.grid is not None else fredholm.default_grid("lue", m=args.m, a=args.a)
        _require(grid[0] >= 0, "grid must start at x >= 0")
        curve = fredholm.lue_curve(args.m, args.a, grid)
    _emit(curve, args)
    return 0


def cmd_verify(args) -> int:
    n4 = 12 if args.N_max is None else args.N_max
    n5 = args.N_max_sqt if args.N_max_sqt is not None else (10 if args.N_max is None else args.N_max)
    _require(min(n4, n5) >= 1, "--N-max must be >= 1")
    rs = args.r if args.r else list(exactcheck.DEFAULT_RS)
    _require(all(r >= 0 for r in rs), "--r values must be >= 0")
    records = exactcheck.run_suite(
        n_max_ts=n4,
        n_max_sqt=n5,
        rs=rs,
        lemma1_m_max=args.lemma_max,
        lemma1_d_max=args.lemma_d_max,
        lemma2_max=args.lemma_max,
        aux_n_max=args.aux_n_max,
    )
    ok = all(r["pass"] for r in records)
    _emit_report({"pass": ok, "checks": len(records), "records": records}, args)
    return 0 if ok else 1


def _nibb_cfg(args, p=None) -> montecarlo.MatrixBridgeConfig:
    try:
        return montecarlo.MatrixBridgeConfig(args.N, args.p if p is None else p, args.steps, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> int:
    _require(args.count >= 1, "--count must be >= 1")
    try:
        if args.model == "nibb":
            batch = montecarlo.sample_nibb_restricted_max(_nibb_cfg(args), args.count, correction=args.correction)
        elif args.model == "antige":
            batch = montecarlo.sample_antige_top(args.n, args.count, args.seed)
        elif args.model == "wishart":
            batch = montecarlo.sample_wishart_loe_top(args.N, args.m, args.count, args.seed)
        else:
            times = args.times if args.times is not None else np.linspace(-4.0, 0.0, 801)
            batch = montecarlo.sample_dyson_stationary_top(args.N, times, args.count, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(batch, args)
    return 0


def compare(pairing: str, N: int, count: int, seed: int, *, p: Sequence[float] = (), steps: int = 4096,
            threshold: float | None = None) -> dict:
    """Run a named theory-vs-empirics pairing and return a JSON-able report."""
    threshold = THRESHOLDS[pairing] if threshold is None else threshold
    report: dict = {"pairing": pairing, "N": N, "count": count, "seed": seed, "threshold": threshold}
    if pairing == "theorem1":
        batch = montecarlo.sample_antige_top(N + 1, count, seed).scaled(math.sqrt(2.0))
        curve = fredholm.limit_curve(N, fredholm.default_grid("limit", N=N, points=1601), "laguerre")
        ks = fredholm.ks_distance(batch, curve)
        report.update(ks=ks, critical_value=fredholm.ks_critical_value(count), passed=ks < threshold)
    elif pairing == "corollary1-smallp":
        ps = list(p) or [1e-3]
        curve = fredholm.limit_curve(N, fredholm.default_grid("limit", N=N, points=1601), "laguerre")
        rows = []
        for pv in ps:
            cfg = montecarlo.MatrixBridgeConfig(N, pv, steps, seed)
            batch = montecarlo.sample_nibb_restricted_max(cfg, count)
            rows.append({"p": pv, "ks": fredholm.ks_distance(batch.values / math.sqrt(pv), curve)})
        order = sorted(rows, key=lambda r: -r["p"])
        monotone = all(a["ks"] > b["ks"] for a, b in zip(order, order[1:]))
        report.update(steps=steps, sweep=rows, monotone=monotone,
                      passed=all(r["ks"] < threshold for r in rows) and monotone)
    elif pairing == "nibm-loe":
        cfg = montecarlo.MatrixBridgeConfig(N, 1.0, steps, seed)
        bridge = montecarlo.sample_nibb_restricted_max(cfg, count).scaled(4.0, 2.0)
        wishart = montecarlo.sample_wishart_loe_top(N, N + 1, count, seed)
        ks = fredholm.ks_two_sample(bridge, wishart)
        report.update(steps=steps, ks=ks, critical_value=fredholm.ks_critical_value(count, m=count),
                      passed=ks < threshold)
    elif pairing == "prop2-selfcheck":
        pv = p[0] if p else 0.5
        cfg = montecarlo.MatrixBridgeConfig(N, pv, steps, seed)
        batch = montecarlo.sample_nibb_restricted_max(cfg, count)
        curve = fredholm.restricted_max_curve(N, pv, fredholm.default_grid("restricted-max", N=N, p=pv, points=801))
        ks = fredholm.ks_distance(batch, curve)
        report.update(p=pv, steps=steps, ks=ks, critical_value=fredholm.ks_critical_value(count),
                      passed=ks < threshold)
    else:
        raise UsageError(f"unknown pairing {pairing!r}")
    return report


def cmd_compare(args) -> int:
    _require(args.N >= 1, "--N must be >= 1")
    _require(args.count >= 1, "--count must be >= 1")
    ps = args.p or []
    _require(all(0 < v < 1 for v in ps), "--p values must lie in (0, 1)")
    _require(args.steps >= 2, "--steps must be >= 2")
    report = compare(args.pairing, args.N, args.count, args.seed, p=ps, steps=args.steps, threshold=args.threshold)
    _emit_report(report, args)
    return 0 if report["passed"] else 1


def cmd_matrix(args) -> int:
    kind = args.kind
    if kind == "laguerre":
        _require(args.m >= 1 and args.a > -1 and args.x >= 0, "laguerre needs --m >= 1, --a > -1, --x >= 0")
        mat = kernels.laguerre_kernel_matrix(args.m, args.a, args.x)
    else:
        _require(args.N >= 1, "--N must be >= 1")
        builders = {
            "q": kernels.q_matrix_closed,
            "f": kernels.f_matrix,
            "s": kernels.s_matrix,
            "t": kernels.t_matrix,
            "a": kernels.a_matrix,
        }
        if kind == "m":
            mat = kernels.m_matrix_general_p(args.N, args.r, args.alpha) if args.alpha is not None else kernels.m_matrix_limit(args.N, args.r)
        else:
            mat = builders[kind](args.N, args.r)
    _emit(mat, args)
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", help="output file (relative paths go under $%s if set)" % serialize.OUTPUT_DIR_ENV)
    p.add_argument("--format", choices=["csv", "json"], default=None, help="defaults to the output suffix, else csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nibb-max", description="Restricted maxima of non-intersecting Brownian bridges.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cdf", help="evaluate a distribution function on a grid")
    p.add_argument("model", choices=["restricted-max", "limit", "lue"])
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--method", choices=["hermite", "laguerre", "matrix"], default="hermite")
    p.add_argument("--grid", type=_grid, default=None, help="min:max:points")
    _add_output(p)
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("verify", aliases=["verify-identities"], help="run the exact identity checks")
    p.add_argument("--N-max", dest="N_max", type=int, default=None, help="largest N (default 12, and 10 for 2SQT = A)")
    p.add_argument("--N-max-sqt", dest="N_max_sqt", type=int, default=None,
                   help="largest N for the 2SQT = A check")
    p.add_argument("--r", type=_rational, nargs="+", default=None, help="rationals such as 1/2 or 7/3")
    p.add_argument("--lemma-max", type=int, default=20)
    p.add_argument("--lemma-d-max", type=int, default=10)
    p.add_argument("--aux-n-max", type=int, default=15)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="draw samples from a model")
    p.add_argument("model", choices=["nibb", "antige", "wishart", "dyson"])
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--steps", type=int, default=4096)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--times", type=_grid, default=None, help="min:max:points for the Dyson sampler")
    p.add_argument("--correction", action="store_true", help="bridge-maximum correction between grid points")
    _add_output(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="theory vs Monte Carlo")
    p.add_argument("pairing", choices=sorted(THRESHOLDS))
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--p", type=float, nargs="+", default=None)
    p.add_argument("--steps", type=int, default=4096)
    p.add_argument("--count", type=int, default=10000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("matrix", help="write one of the kernel matrices")
    p.add_argument("kind", choices=["q", "f", "s", "t", "a", "m", "laguerre"])
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None, help="m only: general-p shape; omit for the limit shape")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--x", type=float, default=1.0)
    _add_output(p)
    p.set_defaults(func=cmd_matrix)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nibb-max: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
