"""Command line entry point: ``qwsearch {skw,akr,grover,sweep,figure,verify}``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import (
    FIGURES,
    MODES,
    ResultTable,
    SweepPlan,
    emit_results,
    figure_plans,
    format_results,
    run_sweep,
)
from .metrics import cost_curve, monte_carlo
from .noise import NoiseKind, NoiseSpec, strength_from_delta
from .oracle import run_verification
from .state_space import Family, WalkSpec
from .walks import default_horizon, grover_probabilities

NOISE_CHOICES = [k.value for k in NoiseKind]


def _parse_marked(text: str | None):
    if text is None:
        return 0
    if "," in text:
        a, b = text.split(",")
        return int(a), int(b)
    return int(text)


def _write(table: ResultTable, args, suffix: str = "") -> None:
    if args.out in (None, "-"):
        sys.stdout.write(format_results(table, args.format))
        return
    path = Path(args.out)
    if suffix:
        path = path.with_name(f"{path.stem}-{suffix}{path.suffix}")
    emit_results(table, path, args.format)
    print(f"wrote {path}", file=sys.stderr)


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")


def _add_noise(p: argparse.ArgumentParser) -> None:
    p.add_argument("--noise", choices=NOISE_CHOICES, default="none")
    p.add_argument("--strength", type=float, default=0.0, help="theta, sigma (radians) or p")
    p.add_argument("--delta", type=float, help="use strength N**(-delta) instead of --strength")
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)


def _walk_command(args, spec: WalkSpec) -> int:
    kind = NoiseKind(args.noise)
    strength = args.strength
    if args.delta is not None:
        strength = strength_from_delta(spec.vertex_count, args.delta)
    noise = NoiseSpec(kind, strength, args.seed)
    s_max = args.steps if args.steps is not None else default_horizon(spec)
    agg = monte_carlo(spec, noise, s_max, args.realizations if kind.is_random else 1)
    cc = cost_curve(agg)
    table = ResultTable(
        ("s", "p_marked", "stderr", "p_unmarked_max", "cost"),
        (int, float, float, float, float),
        meta={
            "tool": "qwsearch",
            "version": __version__,
            "walk": spec.label(),
            "marked": spec.marked,
            "noise": kind.value,
            "strength": strength,
            "realizations": agg.realizations,
            "seed": args.seed,
            "s_max": s_max,
        },
    )
    for s in range(s_max + 1):
        table.rows.append(
            (s, agg.p_marked[s], agg.stderr_marked[s], agg.p_unmarked_max[s], cc.c[s] if s else math.nan)
        )
    _write(table, args)
    peak = int(np.argmax(agg.p_marked))
    print(
        f"{spec.label()} {kind.value} strength={strength:g}: peak p={agg.p_marked[peak]:.6f} at s={peak}; "
        f"min cost {cc.c_star:.4g} at s={cc.s_star} (log_N = {cc.scaled:.4f})",
        file=sys.stderr,
    )
    return 0


def cmd_skw(args) -> int:
    return _walk_command(args, WalkSpec.hypercube(args.n, _parse_marked(args.marked)))


def cmd_akr(args) -> int:
    return _walk_command(args, WalkSpec.grid(args.side, _parse_marked(args.marked)))


def cmd_grover(args) -> int:
    N = 2**args.n
    k = args.steps if args.steps is not None else math.ceil(math.pi / 4 * math.sqrt(N))
    probs = grover_probabilities(args.n, _parse_marked(args.marked), k)
    table = ResultTable(
        ("k", "p_success"),
        (int, float),
        [(i, p) for i, p in enumerate(probs)],
        {"tool": "qwsearch", "version": __version__, "N": N, "i0": _parse_marked(args.marked)},
    )
    _write(table, args)
    print(f"grover N={N}: success {probs[-1]:.12f} after {k} iterations", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    family = Family(args.family)
    sizes = args.n if family is Family.HYPERCUBE else args.side
    if not sizes:
        raise ValueError("give --n (hypercube) or --side (grid) sizes")
    kinds = tuple(NoiseKind(k) for k in args.noise)
    plan = SweepPlan(
        mode=args.mode,
        family=family,
        sizes=tuple(sizes),
        kinds=kinds,
        strengths=tuple(args.strength),
        deltas=tuple(args.delta) if args.delta else (0.0,),
        s_max=args.steps,
        realizations=args.realizations,
        seed=args.seed,
        marked=_parse_marked(args.marked) if family is Family.HYPERCUBE else 0,
    )
    _write(run_sweep(plan, args.workers), args)
    return 0


def cmd_figure(args) -> int:
    plans = figure_plans(args.id, realizations=args.realizations, seed=args.seed, s_max=args.steps)
    for plan in plans:
        _write(run_sweep(plan, args.workers), args, plan.panel)
    return 0


def cmd_verify(args) -> int:
    failed = 0
    for name, ok, detail in run_verification(args.steps, args.seed):
        tag = "INFO" if ok is None else ("PASS" if ok else "FAIL")
        failed += ok is False
        print(f"{tag}  {name}  [{detail}]")
    print(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwsearch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("skw", help="search on an n-dimensional hypercube")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--steps", type=int)
    p.add_argument("--marked", help="marked vertex index")
    _add_noise(p)
    _add_output(p)
    p.set_defaults(func=cmd_skw)

    p = sub.add_parser("akr", help="search on a periodic side x side grid")
    p.add_argument("--side", type=int, default=16)
    p.add_argument("--steps", type=int)
    p.add_argument("--marked", help="marked site 'n0,n1' or flat index")
    _add_noise(p)
    _add_output(p)
    p.set_defaults(func=cmd_akr)

    p = sub.add_parser("grover", help="Grover baseline on n qubits")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--steps", type=int, help="iterations (default ceil(pi/4 sqrt N))")
    p.add_argument("--marked", help="searched index i0")
    _add_output(p)
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("sweep", help="custom parameter sweep")
    p.add_argument("--mode", choices=MODES, default="strength")
    p.add_argument("--family", choices=[f.value for f in Family], default="hypercube")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--side", type=int, nargs="+")
    p.add_argument("--noise", choices=NOISE_CHOICES, nargs="+", default=["gaussian"])
    p.add_argument("--strength", type=float, nargs="+", default=[0.0])
    p.add_argument("--delta", type=float, nargs="+")
    p.add_argument("--steps", type=int)
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--marked")
    p.add_argument("--workers", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="reproduce one figure's data")
    p.add_argument("id", choices=FIGURES)
    p.add_argument("--steps", type=int)
    p.add_argument("--realizations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="dense-oracle checks on small instances")
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, IndexError, OSError) as exc:
        print(f"qwsearch {args.command}: error: {exc}", file=sys.stderr)
        return 1
