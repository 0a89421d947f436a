"""Command line: ``run``, ``preset``, ``converge`` and ``verify-ops``.

Exit codes: 0 success, 2 usage or configuration error, 3 run aborted by blow-up.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import CONFIG_KEYS, ConfigError, parse_config
from .experiment import PRESETS, convergence_study, execute, format_convergence, format_csv, run_preset
from .nodes import RuleKind, build_rule
from .sbp import FD_ORDERS, build_dissipation, build_fd_sbp, build_spectral_sbp, dump_operator, verify_sbp

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ABORTED = 0, 1, 2, 3
OPS_TOL = 1e-12


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file (or an output CSV to re-run)")
    for key in CONFIG_KEYS:
        p.add_argument(f"--{key}", dest=f"cfg_{key}", metavar="VALUE")


def _overrides(args) -> dict:
    return {k: getattr(args, f"cfg_{k}") for k in CONFIG_KEYS}


def _exactness_residual(rule) -> float:
    deg = rule.exactness
    res = 0.0
    for m in range(deg + 1):
        exact = 0.0 if m % 2 else 2.0 / (m + 1)
        res = max(res, abs(rule.integrate(rule.nodes**m) - exact))
    return res


def operator_checks():
    """``(label, residual)`` for every operator family the solver ships."""
    out = []
    for kind in RuleKind:
        for N in range(1, 11):
            rule = build_rule(kind, N)
            out.append((f"{kind.value} N={N} quadrature", _exactness_residual(rule)))
            out.append((f"{kind.value} N={N} sbp", verify_sbp(build_spectral_sbp(rule))))
    for order in FD_ORDERS:
        for n in (20, 50, 100):
            ops = build_fd_sbp(order, n)
            out.append((f"fd{order} n={n} sbp", verify_sbp(ops)))
            out.append((f"fd{order} n={n} D*1", float(np.max(np.abs(ops.D.sum(axis=1))))))
            A = build_dissipation(order, n, 1.0).matrix
            # largest eigenvalue of the M-symmetric dissipation, must be <= 0
            w = np.sqrt(ops.weights)
            sym = (w[:, None] * A) / w[None, :]
            top = float(np.max(np.linalg.eigvalsh(0.5 * (sym + sym.T))))
            out.append((f"fd{order} n={n} dissipation max eig", max(top, 0.0)))
    return out


def cmd_run(args) -> int:
    cfg = parse_config(args.config, _overrides(args))
    result = execute(cfg)
    if cfg.output is None:
        sys.stdout.write(format_csv(result))
    if result.aborted:
        print(f"run aborted by blow-up at t={result.aborted_at:.17g}", file=sys.stderr)
        return EXIT_ABORTED
    if cfg.output is not None:
        last = result.rows[-1]
        print(f"wrote {cfg.output}: t={last['time']:.6g} total_error={last['total_error']:.6e}")
    return EXIT_OK


def cmd_preset(args) -> int:
    if args.name not in PRESETS:
        print(f"error: unknown preset {args.name!r}; available: {', '.join(PRESETS)}",
              file=sys.stderr)
        return EXIT_USAGE
    manifest, results = run_preset(
        args.name, args.out, paper_scale=args.paper_scale, jobs=args.jobs, svg=not args.no_svg
    )
    for name, res in results:
        status = "ok" if not res.aborted else f"aborted t={res.aborted_at:.6g}"
        err = res.rows[-1]["total_error"] if res.rows else float("nan")
        print(f"{name:40s} {status:22s} final total_error={err:.6e}")
    print(f"manifest: {manifest}")
    return EXIT_OK


def cmd_converge(args) -> int:
    base = parse_config(args.config, _overrides(args))
    try:
        Ks = [int(k) for k in args.Ks.split(",") if k.strip()]
    except ValueError:
        raise ConfigError(f"bad K list {args.Ks!r}", "K") from None
    t_eval = base.t_final if args.t_eval is None else args.t_eval
    sys.stdout.write(format_convergence(convergence_study(base, Ks, t_eval)))
    return EXIT_OK


def cmd_verify_ops(args) -> int:
    worst = 0.0
    for label, res in operator_checks():
        flag = "ok" if res <= OPS_TOL else "FAIL"
        print(f"{label:36s} {res:.3e} {flag}")
        worst = max(worst, res)
    if args.dump:
        out = Path(args.dump)
        out.mkdir(parents=True, exist_ok=True)
        for kind in RuleKind:
            for N in range(1, 11):
                dump_operator(build_spectral_sbp(build_rule(kind, N)), out / f"{kind.value}_N{N}.txt")
        for order in FD_ORDERS:
            dump_operator(build_fd_sbp(order, 20), out / f"fd{order}_n20.txt")
        print(f"operators written to {out}")
    return EXIT_OK if worst <= OPS_TOL else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vcadvect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one configuration")
    _add_config_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run all curves of a figure preset")
    p.add_argument("name", help=f"one of: {', '.join(PRESETS)}")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--paper-scale", action="store_true", help="use 200000 steps per curve")
    p.add_argument("--jobs", type=int, default=1, help="curves to run concurrently")
    p.add_argument("--no-svg", action="store_true", help="skip the SVG overview plot")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("converge", help="h-convergence study")
    _add_config_flags(p)
    p.add_argument("--Ks", required=True, help="comma-separated increasing K values")
    p.add_argument("--t-eval", type=float, default=None, help="evaluation time (default t_final)")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("verify-ops", help="check SBP and quadrature properties")
    p.add_argument("--dump", metavar="DIR", help="also write the operator matrices to DIR")
    p.set_defaults(func=cmd_verify_ops)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        key = f" (key: {exc.key})" if exc.key else ""
        print(f"error: {exc}{key}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
