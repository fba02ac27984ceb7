"""Command line experiment runner.

Subcommands write CSV (one header line, floats with 6 significant digits)
to standard output or ``--out``::

    elasticmg lfa-smoothing
    elasticmg lfa-twogrid --scheme vanka
    elasticmg solve --scheme vanka --cycle two-grid --pre 1 --post 0 --n 64
    elasticmg convergence-order --n-list 8 16 32 64 128
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys

from .discretization import assemble_rhs, error_norms, manufactured_solution
from .lfa import optimal_omega, smoothing_factor, twogrid_factor
from .multigrid import CycleConfig, build_hierarchy, solve
from .smoother import DEFAULT_OMEGA, Scheme, SmootherConfig
from .validation import check_damping, check_n_cells, check_params

log = logging.getLogger("elasticmg")

SCHEMES = [s.value for s in Scheme]
NU_PAIR = [0.45, 0.4999999]


def _fmt(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _write(rows, header, out):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _schemes(args):
    return [args.scheme] if args.scheme else SCHEMES


def _smoother_config(args, scheme: str) -> SmootherConfig:
    return SmootherConfig(
        scheme=scheme,
        omega=args.omega,
        schur_mode=args.schur,
        omega_j=args.omega_j,
        max_sweeps=args.max_sweeps,
        schur_tol=args.schur_tol,
        schur_tol_relative=not args.schur_tol_absolute,
    )


def cmd_lfa_smoothing(args):
    rows = []
    for nu in args.nu:
        params = check_params(args.epsilon, nu)
        for scheme in _schemes(args):
            w_opt, mu_opt = optimal_omega(scheme, params, samples=2 * args.freq_samples)
            w = args.omega if args.omega is not None else DEFAULT_OMEGA[Scheme(scheme)]
            mu = smoothing_factor(scheme, w, params, samples=2 * args.freq_samples)
            rows.append((scheme, str(args.epsilon), str(nu), w_opt, mu_opt, w, mu))
    _write(rows, ["scheme", "epsilon", "nu", "omega_opt", "mu_opt", "omega", "mu"], args.out)
    return 0


def cmd_lfa_twogrid(args):
    rows = []
    for scheme in _schemes(args):
        for nu in args.nu:
            params = check_params(args.epsilon, nu)
            for gamma in args.gamma:
                rho = twogrid_factor(
                    scheme, args.omega, (gamma + 1) // 2, gamma // 2, params,
                    h=1.0 / args.lfa_n, samples=args.freq_samples,
                )
                rows.append((scheme, str(args.epsilon), str(nu), gamma, rho))
    _write(rows, ["scheme", "epsilon", "nu", "gamma", "rho"], args.out)
    return 0


def _cycle_config(args, scheme):
    return CycleConfig(
        kind=args.cycle,
        nu_pre=args.pre,
        nu_post=args.post,
        smoother=_smoother_config(args, scheme),
        tol=args.tol,
        max_iter=args.max_iter,
        rng_seed=args.seed,
    )


def cmd_solve(args):
    rows, history = [], []
    for scheme in [args.scheme or "vanka"]:
        cfg = _cycle_config(args, scheme)
        for nu in args.nu:
            params = check_params(args.epsilon, nu)
            for n in args.n:
                hier = build_hierarchy(n, params, cfg.smoother)
                result = solve(hier, assemble_rhs(hier.finest.grid, params), cfg)
                log.info("%s nu=%g N=%d: %d iterations, rho_hat=%.4f, converged=%s",
                         scheme, nu, n, result.iterations, result.rho_hat, result.converged)
                key = (scheme, str(args.epsilon), str(nu), cfg.kind.value, args.pre, args.post, args.schur, n)
                rows.append(key + (result.iterations, result.rho_hat, result.converged))
                history.extend(key + (k, r) for k, r in enumerate(result.history))
    head = ["scheme", "epsilon", "nu", "cycle", "pre", "post", "schur", "n"]
    _write(rows, head + ["iterations", "rho_hat", "converged"], args.out)
    if args.history_out:
        _write(history, head + ["iter", "relative_residual"], args.history_out)
    return 0


def cmd_convergence_order(args):
    scheme = args.scheme or "vanka"
    cfg = _cycle_config(args, scheme)
    ns = list(args.n)
    if ns != sorted(ns):
        raise SystemExit("--n-list must be ascending")
    rows = []
    for nu in args.nu:
        params = check_params(args.epsilon, nu)
        prev = None
        for n in ns:
            hier = build_hierarchy(n, params, cfg.smoother)
            grid = hier.finest.grid
            result = solve(hier, assemble_rhs(grid, params), cfg)
            errs = error_norms(result.state, manufactured_solution(grid, params))
            if prev is None:
                orders = (float("nan"),) * 3
            else:
                orders = tuple(math.log2(a / b) for a, b in zip(prev, errs))
            prev = errs
            rows.append((str(args.epsilon), str(nu), n) + errs + orders + (result.iterations, result.converged))
    header = ["epsilon", "nu", "n", "err_u", "err_v", "err_p",
              "order_u", "order_v", "order_p", "iterations", "converged"]
    _write(rows, header, args.out)
    return 0


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _grid_size(text):
    try:
        return check_n_cells(int(text))
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _damping(text):
    try:
        return check_damping(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _samples(text):
    value = int(text)
    if value < 32:
        raise argparse.ArgumentTypeError(f"need at least 32 frequency samples, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=float, default=1.0)
    common.add_argument("--scheme", choices=SCHEMES)
    common.add_argument("--omega", type=_damping, help="smoother damping (default: LFA-optimal)")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    cycle = argparse.ArgumentParser(add_help=False)
    cycle.add_argument("--cycle", choices=["two-grid", "v", "w"], default="v")
    cycle.add_argument("--pre", type=int, default=1)
    cycle.add_argument("--post", type=int, default=1)
    cycle.add_argument("--schur", choices=["exact", "jacobi"], default="jacobi")
    cycle.add_argument("--omega-j", type=_damping, help="Schur Jacobi weight (default per scheme)")
    cycle.add_argument("--max-sweeps", type=_positive_int, default=3)
    cycle.add_argument("--schur-tol", type=float, default=0.1)
    cycle.add_argument("--schur-tol-absolute", action="store_true",
                       help="treat --schur-tol as an absolute residual bound")
    cycle.add_argument("--seed", type=int, default=0)
    cycle.add_argument("--tol", type=float, default=1e-10)
    cycle.add_argument("--max-iter", type=_positive_int, default=100)

    parser = argparse.ArgumentParser(prog="elasticmg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lfa-smoothing", parents=[common], help="optimal smoothing factors")
    p.add_argument("--nu", type=float, nargs="+", default=NU_PAIR)
    p.add_argument("--freq-samples", type=_samples, default=64)
    p.set_defaults(func=cmd_lfa_smoothing)

    p = sub.add_parser("lfa-twogrid", parents=[common], help="two-grid LFA factors")
    p.add_argument("--nu", type=float, nargs="+", default=NU_PAIR)
    p.add_argument("--gamma", type=_positive_int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--freq-samples", type=_samples, default=64)
    p.add_argument("--lfa-n", type=_positive_int, default=128, help="mesh size 1/h of the symbols")
    p.set_defaults(func=cmd_lfa_twogrid)

    p = sub.add_parser("solve", parents=[common, cycle], help="measured multigrid convergence")
    p.add_argument("--nu", type=float, nargs="+", default=[0.45])
    p.add_argument("--n", "--n-list", dest="n", type=_grid_size, nargs="+", default=[64])
    p.add_argument("--history-out", help="CSV path for per-iteration relative residuals")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("convergence-order", parents=[common, cycle], help="discretization error study")
    p.add_argument("--nu", type=float, nargs="+", default=[0.45])
    p.add_argument("--n", "--n-list", dest="n", type=_grid_size, nargs="+", default=[8, 16, 32, 64, 128])
    p.set_defaults(func=cmd_convergence_order)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {args.epsilon}")
        for nu in args.nu:
            check_params(args.epsilon, nu)
        if hasattr(args, "pre") and (args.pre < 0 or args.post < 0 or args.pre + args.post < 1):
            raise ValueError("--pre/--post must be non-negative with at least one smoothing step")
    except ValueError as exc:
        parser.error(str(exc))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
