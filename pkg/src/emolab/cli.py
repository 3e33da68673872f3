"""Command-line surface: run sweeps, single runs, front oracles, and SVG charts.

Every subcommand prints its fully resolved configuration (including seeds)
before doing any work, so any output can be reproduced from the printed
line alone. Exit codes: 0 success, 2 usage or validation problem, 3 I/O
failure. The EMO_LAB_SEED environment variable supplies a master seed when
--seed is not given.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import lab
from .evolve import AlgorithmConfig, GenerationTrace, run
from .problems import (
    ClosedFormUnavailableError,
    EnumerationLimitError,
    NkLandscape,
    OneJumpZeroJump,
    OneMinMax,
    OneMinMaxStar,
    default_reference_point,
    enumerate_pareto_front,
    generate_nk_instance,
    pareto_front_closed_form,
)
from .core import child_seed, stream
from .survival import CrowdingDistance, ReferencePointDistance

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _resolve_seed(value):
    if value is not None:
        return int(value)
    env = os.environ.get("EMO_LAB_SEED")
    if env is not None:
        return int(env)
    return None


def _build_problem(family: str, n: int, k: int, master_seed: int):
    if family == "omm":
        return OneMinMax(n)
    if family == "ojzj":
        return OneJumpZeroJump(n, k)
    if family == "ommstar":
        return OneMinMaxStar(n)
    if family == "nk":
        instance_seed = child_seed(master_seed, "nk-instance", n)
        return NkLandscape(generate_nk_instance(n, 3, instance_seed))
    raise ValueError(f"unknown problem family {family!r}")


def _reference_for(problem, master_seed: int):
    if isinstance(problem, NkLandscape):
        return default_reference_point(
            problem, stream(child_seed(master_seed, "nk-ref", problem.n)))
    return default_reference_point(problem)


def cmd_sweep(args) -> int:
    if args.preset is not None:
        presets = lab.preset_plans()
        if args.preset not in presets:
            print(f"error: unknown preset {args.preset!r}; "
                  f"choose from {sorted(presets)}", file=sys.stderr)
            return EXIT_USAGE
        plan = presets[args.preset]
    else:
        try:
            plan = lab.load_plan(args.plan)
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot load plan {args.plan!r}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    plan = lab.with_overrides(plan, runs=args.runs, master_seed=_resolve_seed(args.seed))
    try:
        lab.validate_plan(plan)
    except ValueError as exc:
        print(f"error: invalid plan: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"sweep plan={plan.name} problem={plan.problem} n_values={list(plan.n_values)} "
          f"variants={[v.label for v in plan.variants]} runs={plan.runs_per_cell} "
          f"master_seed={plan.master_seed} cap={plan.max_evaluations} "
          f"parallelism={args.parallelism} out={args.out}")
    records = lab.run_experiment(plan, parallelism=args.parallelism)
    summary = lab.summarize(records)
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        lab.write_trials_csv(records, out_dir / "trials.csv")
        lab.write_summary_csv(summary, out_dir / "summary.csv")
    except OSError as exc:
        print(f"error: cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(records)} trials to {out_dir / 'trials.csv'} "
          f"and {len(summary)} summary rows to {out_dir / 'summary.csv'}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    master_seed = _resolve_seed(args.seed)
    if master_seed is None:
        master_seed = lab.DEFAULT_MASTER_SEED
    print(f"oracle problem={args.problem} n={args.n} k={args.k} seed={master_seed}")
    try:
        problem = _build_problem(args.problem, args.n, args.k, master_seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        front = pareto_front_closed_form(problem)
    except ClosedFormUnavailableError:
        try:
            front = enumerate_pareto_front(problem)
        except EnumerationLimitError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    for point in front.sorted_points():
        print(" ".join(f"{v:g}" for v in point))
    print(f"size {len(front)}")
    return EXIT_OK


def cmd_run(args) -> int:
    seed = _resolve_seed(args.seed)
    if seed is None:
        seed = lab.DEFAULT_MASTER_SEED
    try:
        problem = _build_problem(args.problem, args.n, args.k, seed)
        reference = _reference_for(problem, seed)
        k = args.k if args.problem == "ojzj" else None
        pop_size = lab.resolve_pop_size(args.pop, args.n, k)
        if args.algo == "nsga2":
            policy = CrowdingDistance()
        else:
            policy = ReferencePointDistance(reference)
        config = AlgorithmConfig(
            policy=policy,
            pop_size=pop_size,
            reference_point=reference,
            mutation_rate=args.rate,
            max_evaluations=args.cap,
        )
    except (ValueError, EnumerationLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"run problem={args.problem} n={args.n} k={args.k} algo={args.algo} "
          f"pop_size={pop_size} rate={args.rate if args.rate is not None else f'1/{args.n}'} "
          f"cap={args.cap} seed={seed} "
          f"reference={tuple(round(v, 6) for v in reference)}")
    trace = None
    if args.trace is not None:
        trace = GenerationTrace(problem, reference)
    result = run(problem, config, seed, on_generation=trace)
    if args.trace is not None:
        try:
            trace.write_csv(args.trace)
        except OSError as exc:
            print(f"error: cannot write trace: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote trace with {len(trace.rows)} rows to {args.trace}")
    print(f"hit={'true' if result.hit else 'false'} "
          f"evaluations_to_hit={result.evaluations_to_hit} "
          f"evaluations={result.evaluations} generations={result.generations} "
          f"seed={result.seed}")
    return EXIT_OK


def render_line_chart(series, log_y: bool = False, title: str = "") -> str:
    """Build an SVG line chart: one polyline and one marker set per series.

    series maps a label to a list of (x, y) pairs. With log_y the y axis is
    log10-scaled; callers must guard against non-positive values first.
    """
    import math

    width, height = 720, 440
    left, right, top, bottom = 80, 200, 40, 60
    plot_w = width - left - right
    plot_h = height - top - bottom

    xs = sorted({x for pts in series.values() for x, _ in pts})
    ys = [math.log10(y) if log_y else y for pts in series.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1, y_hi + 1

    def sx(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        y = math.log10(y) if log_y else y
        return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        'stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>',
    ]
    if title:
        parts.append(f'<text x="{left}" y="{top - 14}" font-size="15">{title}</text>')

    for x in xs:
        parts.append(f'<line x1="{sx(x):.2f}" y1="{top + plot_h}" x2="{sx(x):.2f}" '
                     f'y2="{top + plot_h + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(x):.2f}" y="{top + plot_h + 22}" font-size="12" '
                     f'text-anchor="middle">{x:g}</text>')
    ticks = 5
    for i in range(ticks):
        y_val = y_lo + (y_hi - y_lo) * i / (ticks - 1)
        y_pix = top + plot_h - (y_val - y_lo) / (y_hi - y_lo) * plot_h
        shown = 10 ** y_val if log_y else y_val
        parts.append(f'<line x1="{left - 5}" y1="{y_pix:.2f}" x2="{left}" y2="{y_pix:.2f}" '
                     'stroke="black"/>')
        parts.append(f'<text x="{left - 9}" y="{y_pix + 4:.2f}" font-size="12" '
                     f'text-anchor="end">{shown:.4g}</text>')

    for idx, (label, pts) in enumerate(sorted(series.items())):
        color = PALETTE[idx % len(PALETTE)]
        pts = sorted(pts)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" '
                     f'points="{coords}"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3.5" '
                         f'fill="{color}"/>')
        ly = top + 18 + idx * 20
        lx = left + plot_w + 16
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}" font-size="13">{label}</text>')

    parts.append("</svg>")
    return "\n".join(parts)


def cmd_plot(args) -> int:
    print(f"plot summary={args.summary} out={args.out} log_y={args.log_y}")
    try:
        rows = lab.read_summary_csv(args.summary)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read summary {args.summary!r}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not rows:
        print("error: summary contains no data rows", file=sys.stderr)
        return EXIT_USAGE
    if args.log_y and any(row.mean_evals <= 0 for row in rows):
        print("error: --log-y requires every mean to be positive", file=sys.stderr)
        return EXIT_USAGE
    series = {}
    multi_problem = len({row.problem for row in rows}) > 1
    for row in rows:
        label = f"{row.problem}/{row.variant}" if multi_problem else row.variant
        series.setdefault(label, []).append((row.n, row.mean_evals))
    svg = render_line_chart(series, log_y=args.log_y, title=args.title)
    try:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(svg + "\n")
    except OSError as exc:
        print(f"error: cannot write SVG: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote chart with {len(series)} series to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emolab",
        description="NSGA-II / R-NSGA-II experiment lab on bitstring benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a preset or plan file, write trials/summary CSVs")
    group = sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=("omm", "ojzj", "ommstar", "nk"))
    group.add_argument("--plan", help="path to a plan JSON file")
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument("--runs", type=int, default=None, help="override runs per cell")
    sweep.add_argument("--seed", type=int, default=None, help="master seed override")
    sweep.add_argument("--parallelism", type=int, default=os.cpu_count() or 1)
    sweep.set_defaults(func=cmd_sweep)

    oracle = sub.add_parser("oracle", help="print a problem's Pareto front")
    oracle.add_argument("--problem", required=True, choices=("omm", "ojzj", "ommstar", "nk"))
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--k", type=int, default=2, help="valley width for ojzj")
    oracle.add_argument("--seed", type=int, default=None, help="master seed (NK instance)")
    oracle.set_defaults(func=cmd_oracle)

    runner = sub.add_parser("run", help="execute a single seeded run")
    runner.add_argument("--problem", required=True, choices=("omm", "ojzj", "ommstar", "nk"))
    runner.add_argument("--n", type=int, required=True)
    runner.add_argument("--k", type=int, default=2, help="valley width for ojzj")
    runner.add_argument("--algo", required=True, choices=("nsga2", "rnsga2"))
    runner.add_argument("--pop", default="4*(n+1)",
                        help="population size, an integer or a rule over n (and k)")
    runner.add_argument("--rate", type=float, default=None, help="mutation rate (default 1/n)")
    runner.add_argument("--cap", type=int, default=None, help="evaluation budget")
    runner.add_argument("--seed", type=int, default=None)
    runner.add_argument("--trace", default=None, help="write a per-generation trace CSV here")
    runner.set_defaults(func=cmd_run)

    plot = sub.add_parser("plot", help="render a summary CSV as an SVG line chart")
    plot.add_argument("--summary", required=True, help="summary.csv from a sweep")
    plot.add_argument("--out", required=True, help="output SVG path")
    plot.add_argument("--log-y", action="store_true", dest="log_y")
    plot.add_argument("--title", default="")
    plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())
