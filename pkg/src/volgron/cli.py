"""Batch command-line front end.

Subcommands: ``ml`` (generalised Mittag-Leffler values), ``resolvent``
(iterated-kernel tables from a JSON problem configuration), ``gronwall``
(bound curves), ``solve`` (built-in fixed-point problems with
iterate-error tables) and ``selftest`` (the acceptance suite).  Outputs
are CSV or JSON with 17-significant-digit floats and sorted keys, so
identical invocations produce identical bytes.

Exit codes: 0 on success, 1 on configuration errors (unknown subcommand,
malformed configuration, unreadable file), 2 on numerical failure where
a certified result was demanded.  Relative ``--out`` paths are resolved
against the directory named by the ``VOLGRON_OUT_DIR`` environment
variable when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from .config import ConfigError, load_problem_config
from .domains import Interval1D, QuadratureGrid, VoidSet
from .fixpoint import DivergentBoundError, picard_solve
from .gronwall import GronwallInput, gronwall_curve
from .measures import DiscreteMeasure
from .problems import PROBLEMS
from .resolvent import iterated_kernels
from .specfun import MLParams, mittag_leffler

__all__ = ["main"]


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 with a distinct message
        raise _CliError(f"argument error: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="volgron",
                     description="resolvent kernels, Gronwall bounds and "
                                 "certified Picard iteration")
    sub = parser.add_subparsers(dest="command")

    p_ml = sub.add_parser("ml", help="evaluate the generalised "
                                     "Mittag-Leffler series")
    p_ml.add_argument("--alpha", type=float, required=True)
    p_ml.add_argument("--beta", type=float, required=True)
    p_ml.add_argument("--p", type=float, default=1.0)
    p_ml.add_argument("--z", type=float, required=True)
    p_ml.add_argument("--tol", type=float, default=1e-14)
    p_ml.add_argument("--out", type=str, default=None)

    p_res = sub.add_parser("resolvent", help="tabulate iterated kernels")
    p_res.add_argument("--config", type=str, required=True)
    p_res.add_argument("--n", type=int, default=None,
                       help="layers to tabulate (default: config, then 3)")
    p_res.add_argument("--p", type=float, default=None,
                       help="override the power from the configuration")
    p_res.add_argument("--grid-level", type=int, default=6)
    p_res.add_argument("--output", choices=("csv", "json"), default="csv")
    p_res.add_argument("--out", type=str, default=None)

    p_gro = sub.add_parser("gronwall", help="emit a bound curve")
    p_gro.add_argument("--config", type=str, required=True)
    p_gro.add_argument("--grid-level", type=int, default=8)
    p_gro.add_argument("--points", type=int, default=17)
    p_gro.add_argument("--out", type=str, default=None)

    p_sol = sub.add_parser("solve", help="run a built-in fixed-point problem")
    p_sol.add_argument("--problem", choices=sorted(PROBLEMS), required=True)
    p_sol.add_argument("--tol", type=float, default=1e-6)
    p_sol.add_argument("--max-iter", type=int, default=25)
    p_sol.add_argument("--grid-level", type=int, default=9)
    p_sol.add_argument("--rate", type=float, default=2.0,
                       help="rate of the linear Volterra problem")
    p_sol.add_argument("--alpha", type=float, default=0.75,
                       help="exponent of the Abel problem")
    p_sol.add_argument("--contraction", type=float, default=0.5,
                       help="contraction of the scalar toy problem")
    p_sol.add_argument("--out", type=str, default=None)

    p_self = sub.add_parser("selftest", help="run the acceptance checks")
    p_self.add_argument("--seed", type=int, default=42)

    return parser


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    base = os.environ.get("VOLGRON_OUT_DIR")
    if base and not os.path.isabs(out):
        out = os.path.join(base, out)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_ml(args) -> int:
    if args.tol <= 0:
        raise _CliError("tol must be positive")
    sv = mittag_leffler(MLParams(args.alpha, args.beta, args.p), args.z,
                        tol=args.tol)
    text = ("value,tail_bound,terms,converged\n"
            f"{_fmt(sv.sum)},{_fmt(sv.tail_bound)},{sv.terms_used},"
            f"{str(sv.converged).lower()}\n")
    _write(text, args.out)
    if not sv.converged:
        return 2
    return 0


def _load(path_or_json: str):
    try:
        return load_problem_config(path_or_json)
    except FileNotFoundError as exc:
        raise _CliError(f"unreadable configuration file: {exc}")
    except json.JSONDecodeError as exc:
        raise _CliError(f"malformed configuration JSON: {exc}")
    except ConfigError as exc:
        raise _CliError(f"bad configuration: {exc}")


def _cmd_resolvent(args) -> int:
    cfg = _load(args.config)
    p = args.p if args.p is not None else float(cfg.params.get("p", 1.0))
    n = args.n if args.n is not None else int(cfg.params.get("n", 3))
    level = args.grid_level
    if isinstance(cfg.measure, DiscreteMeasure):
        grid = None
    elif isinstance(cfg.domain, Interval1D):
        grid = QuadratureGrid.for_interval(cfg.domain, level)
    else:
        from .domains import ProductBox

        if not isinstance(cfg.domain, ProductBox):
            raise _CliError("resolvent tables need an interval, box, or "
                            "discrete configuration")
        grid = QuadratureGrid.for_box(cfg.domain, level)
    table = iterated_kernels(cfg.kernel, cfg.measure, p, n, grid)
    text = table.to_csv() if args.output == "csv" else table.to_json() + "\n"
    _write(text, args.out)
    return 0


def _cmd_gronwall(args) -> int:
    cfg = _load(args.config)
    params = cfg.params
    p = float(params.get("p", 1.0))
    v0 = float(params.get("v0", 1.0))
    l_kernel = None
    if "l" in cfg.raw:
        from .config import parse_kernel

        l_kernel = parse_kernel(cfg.raw["l"])
    inp = GronwallInput(v0=v0, k=cfg.kernel, measure=cfg.measure, p=p,
                        domain=cfg.domain, l=l_kernel)
    if isinstance(cfg.domain, VoidSet):
        if not isinstance(cfg.measure, DiscreteMeasure):
            raise _CliError("void-ordered configurations need atoms")
        ts = sorted(set(cfg.measure.points.tolist()))
    else:
        ts = np.linspace(cfg.domain.lo, cfg.domain.hi,
                         args.points + 1)[1:].tolist()
    curve = gronwall_curve(inp, ts, level=args.grid_level)
    _write(curve.to_csv(), args.out)
    return 0 if np.all(np.isfinite(curve.sharp)) else 2


def _cmd_solve(args) -> int:
    kwargs = {}
    if args.problem == "volterra":
        kwargs = {"rate": args.rate, "level": args.grid_level}
    elif args.problem == "abel":
        kwargs = {"alpha": args.alpha, "level": min(args.grid_level, 8)}
    elif args.problem == "banach":
        kwargs = {"contraction": args.contraction}
    prob = PROBLEMS[args.problem](**kwargs)
    x_hat, cert = picard_solve(prob.spec, prob.x0, tol=args.tol,
                               max_iter=args.max_iter)
    # iterate-error table at a handful of certificate nodes
    n_nodes = cert.ts.size
    sample = sorted(set([n_nodes - 1] + list(range(0, n_nodes,
                                                   max(1, n_nodes // 4)))))
    stride = max(1, (prob.spec.grid.size - 1) // max(1, n_nodes - 1))
    lines = ["n,t,measured_error_vs_reference,certified_bound"]
    x = prob.x0.copy()
    for n in range(1, cert.iterates + 1):
        x = np.asarray(prob.spec.apply(x), dtype=float)
        profile = prob.spec.distance_profile(x, prob.reference)
        for j in sample:
            t = cert.ts[j]
            measured = profile[j * stride] if prob.spec.ordered else profile[j]
            lines.append(f"{n},{_fmt(t)},{_fmt(float(measured))},"
                         f"{_fmt(cert.bound(n, j))}")
    _write("\n".join(lines) + "\n", args.out)
    return 0 if cert.converged else 2


def _cmd_selftest(args) -> int:
    from .selftest import run_all

    ok = run_all(seed=args.seed)
    return 0 if ok else 2


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _CliError("missing subcommand (ml, resolvent, gronwall, "
                            "solve, selftest)")
        if args.command == "ml":
            return _cmd_ml(args)
        if args.command == "resolvent":
            return _cmd_resolvent(args)
        if args.command == "gronwall":
            return _cmd_gronwall(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "selftest":
            return _cmd_selftest(args)
        raise _CliError(f"unknown subcommand {args.command!r}")
    except _CliError as exc:
        print(f"volgron: {exc}", file=sys.stderr)
        return 1
    except DivergentBoundError as exc:
        print(f"volgron: certificate failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
