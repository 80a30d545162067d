"""Command-line driver.

Exit codes: 0 success, 2 hypothesis or validation failure, 3 non-convergence,
4 configuration or input error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classify import admissible_lambda_window, check_hypotheses, classify_alpha
from .config import BUNDLED, bundled, load
from .errors import (
    ConfigError,
    DivergenceError,
    EnclosureViolationError,
    ExprEvalError,
    ExprSyntaxError,
    HypothesisViolationError,
    IntegrationError,
    InvalidInputError,
    InvalidMeshError,
    KernelError,
    LinearAlgebraError,
    MonotonicityBreachError,
    OrderValidationError,
    ProblemSpecError,
    SbvpError,
    UnknownIdentifierError,
    UnsupportedAlphaError,
)
from .green import build_kernel, kernel_grid, kernel_sign_report
from .iterate import solve_enclosure, validate_lower, validate_upper
from .model import GridFunction, make_grid, sup_norm_diff
from .oracle import FdConfig, fd_solve, residual

EXIT_OK, EXIT_HYPOTHESIS, EXIT_NONCONVERGENCE, EXIT_CONFIG = 0, 2, 3, 4

SOLUTION_HEADER = ["x", "u_star", "v_star", "oracle", "|u-oracle|"]
TRACE_HEADER = ["iter", "side", "residual", "step_norm", "min_gap"]
KERNEL_HEADER = ["x", "t", "G"]
ORACLE_HEADER = ["x", "y"]

_EXIT_FOR = (
    ((HypothesisViolationError, OrderValidationError, KernelError, EnclosureViolationError,
      MonotonicityBreachError), EXIT_HYPOTHESIS),
    ((DivergenceError, IntegrationError, LinearAlgebraError), EXIT_NONCONVERGENCE),
    ((ConfigError, ExprSyntaxError, UnknownIdentifierError, ExprEvalError, ProblemSpecError,
      InvalidInputError, UnsupportedAlphaError, InvalidMeshError), EXIT_CONFIG),
)


def fmt(v) -> str:
    return f"{float(v):.17g}"


def write_csv(path, header, rows):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([r if isinstance(r, str) else fmt(r) for r in row])


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


# subcommands -----------------------------------------------------------------

def cmd_classify(args):
    case, regime, hyp = classify_alpha(args.alpha, args.fy_sign)
    print(f"{case.value} {regime.value} {hyp}")
    return EXIT_OK


def cmd_check(args):
    rep = check_hypotheses(args.alpha, args.lam, args.delta, args.eta)
    hyp = rep.governing()
    print(f"case {rep.case.value}  nu {fmt(rep.nu)}")
    for name, ok in rep.holds.items():
        print(f"  {name:4s} {'holds' if ok else 'fails'}")
    for name, v in rep.margins.items():
        print(f"  {name} = {fmt(v)}")
    if hyp is None:
        _err("no hypothesis holds at these parameters")
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_lambda_window(args):
    _, regime, hyp = classify_alpha(args.alpha, args.fy_sign)
    w = admissible_lambda_window(args.alpha, args.delta, args.eta, args.m, regime, args.fy_sign, floor=args.floor)
    if not w.nonempty:
        print(f"{hyp}: empty")
        return EXIT_HYPOTHESIS
    print(f"{hyp} [{fmt(w.lo)}, {fmt(w.hi)}]")
    return EXIT_OK


def _load(args):
    cfg = bundled(args.example) if getattr(args, "example", None) else load(args.config)
    return cfg


def _run_solve(cfg, out=None, trace_out=None, n=None, quiet=False):
    p = cfg.problem()
    n = n or cfg.n
    grid = make_grid(n, p.eta)
    for side, v in (("upper", validate_upper(p, grid)), ("lower", validate_lower(p, grid))):
        if not v.valid:
            raise OrderValidationError(f"{side} solution fails its {v.check} check at x={fmt(v.location)} "
                                       f"(margin {v.margin:.3g})")
    lam = cfg.resolve_lambda()
    rep = solve_enclosure(p, lam, cfg.tol, cfg.max_iter, grid)
    init = GridFunction(grid, 0.5 * (p.upper0.value(grid) + p.lower0.value(grid)) * np.ones_like(grid))
    orc = fd_solve(p, FdConfig(n=n), init)
    u, v = rep.u_star.values, rep.v_star.values
    err = np.abs(u - orc.values)
    if out:
        write_csv(out, SOLUTION_HEADER, zip(grid, u, v, orc.values, err))
    if trace_out:
        rows = []
        for tr in rep.traces:
            for i, g in enumerate(tr.iterates):
                rows.append([str(i), tr.side, tr.residuals[i], tr.step_norms[i], tr.min_gaps[i]])
        write_csv(trace_out, TRACE_HEADER, rows)
    if not quiet:
        tu, tv = rep.traces
        print(f"{cfg.name or 'problem'}: {rep.kernel.case.value} {rep.regime.value} {rep.kernel.hypothesis} "
              f"lambda={fmt(lam)}")
        print(f"  iterations upper={len(tu)} lower={len(tv)} converged={rep.converged} "
              f"monotone={tu.monotone_ok and tv.monotone_ok}")
        print(f"  enclosure width={rep.enclosure_width:.3e} unique_claimed={rep.unique_claimed}")
        print(f"  max|u*-oracle|={float(err.max()):.3e} max|v*-oracle|={sup_norm_diff(rep.v_star, orc):.3e} "
              f"residual={residual(p, rep.u_star):.3e}")
    return rep


def cmd_solve(args):
    if args.force:
        _err("solve does not iterate with --force; use 'green --force' to explore kernels")
        return EXIT_HYPOTHESIS
    cfg = _load(args)
    rep = _run_solve(cfg, args.out or cfg.solution, args.trace or cfg.trace, args.n)
    if not rep.converged:
        _err(f"monotone iteration did not converge in {cfg.max_iter} steps")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_oracle(args):
    cfg = _load(args)
    p = cfg.problem()
    n = args.n or cfg.n
    fd = FdConfig(n=n)
    grid = make_grid(n, p.eta)
    if args.init == "zero":
        y0 = np.zeros_like(grid)
    else:
        src = {"upper": p.upper0, "lower": p.lower0}
        y0 = (0.5 * (p.upper0.value(grid) + p.lower0.value(grid)) if args.init == "mid"
              else src[args.init].value(grid)) * np.ones_like(grid)
    y = fd_solve(p, fd, GridFunction(grid, y0))
    if args.out:
        write_csv(args.out, ORACLE_HEADER, zip(y.nodes, y.values))
    print(f"oracle n={n}: min={fmt(y.values.min())} max={fmt(y.values.max())} residual={residual(p, y):.3e}")
    return EXIT_OK


def cmd_green(args):
    k = build_kernel(args.alpha, args.lam, args.delta, args.eta, force=args.force)
    xs, ts, g = kernel_grid(k, args.m)
    if args.out:
        rows = ((xs[i], ts[j], g[i, j]) for i in range(len(xs)) for j in range(len(ts)))
        write_csv(args.out, KERNEL_HEADER, rows)
    worst, where = kernel_sign_report(k, args.m)
    print(f"{k.case.value} {k.hypothesis} expect {k.sign_expectation} denom={fmt(k.denom)} "
          f"condition={k.condition:.3e}{' (forced)' if k.forced else ''}")
    print(f"  worst wrong-signed value {worst:.3e}" + (f" at x={fmt(where[0])}, t={fmt(where[1])}" if where else ""))
    return EXIT_OK


def cmd_examples(args):
    names = args.which or list(BUNDLED)
    status = EXIT_OK
    outdir = Path(args.out_dir) if args.out_dir else None
    for name in names:
        cfg = bundled(name)
        out = outdir / f"{name}_solution.csv" if outdir else None
        tr = outdir / f"{name}_trace.csv" if outdir else None
        rep = _run_solve(cfg, out, tr)
        if not rep.converged:
            status = max(status, EXIT_NONCONVERGENCE)
    return status


# parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tpsbvp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def params(p, lam=True):
        p.add_argument("--alpha", type=float, required=True)
        if lam:
            p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--eta", type=float, required=True)

    p = sub.add_parser("classify", help="case, regime and governing hypothesis for alpha")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--fy-sign", required=True, help="pos or neg")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check", help="evaluate the hypotheses at (alpha, lambda, delta, eta)")
    params(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lambda-window", help="largest admissible lambda interval")
    params(p, lam=False)
    p.add_argument("--m", type=float, required=True, help="Lipschitz constant M")
    p.add_argument("--fy-sign", required=True)
    p.add_argument("--floor", type=float, default=-100.0, help="scan floor for lambda < 0")
    p.set_defaults(func=cmd_lambda_window)

    def source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--config", help="INI run configuration")
        g.add_argument("--example", choices=BUNDLED, help="bundled configuration")
        p.add_argument("--n", type=int, default=None, help="mesh size (overrides config)")

    p = sub.add_parser("solve", help="monotone iteration from both sides plus oracle check")
    source(p)
    p.add_argument("--out", help="solution CSV")
    p.add_argument("--trace", help="iteration trace CSV")
    p.add_argument("--force", action="store_true", help="refused: solve never runs on a forced kernel")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="finite-difference Newton solve only")
    source(p)
    p.add_argument("--out", help="CSV with columns x,y")
    p.add_argument("--init", choices=("mid", "upper", "lower", "zero"), default="mid")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("green", help="dump the Green's kernel on an m x m grid")
    params(p)
    p.add_argument("--m", type=int, default=101)
    p.add_argument("--out", help="kernel CSV")
    p.add_argument("--force", action="store_true", help="build even if the hypothesis fails")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("examples", help="run the bundled example configurations")
    p.add_argument("--which", nargs="*", choices=BUNDLED)
    p.add_argument("--out-dir", help="directory for solution and trace CSVs")
    p.set_defaults(func=cmd_examples)
    return ap


def run_command(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        return args.func(args)
    except SbvpError as exc:
        for types, code in _EXIT_FOR:
            if isinstance(exc, types):
                _err(str(exc))
                return code
        _err(str(exc))
        return EXIT_NONCONVERGENCE
    except OSError as exc:
        _err(str(exc))
        return EXIT_CONFIG


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
