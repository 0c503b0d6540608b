"""Command-line front end.

Thin adapter over the library: every number printed here is computed by the
benchmark, engine, harness, or stats modules. Exit codes: 0 on success, 2 on
usage errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import benchmarks, harness, stats
from .core import RngStream
from .engines import ALGORITHMS, algorithm_registry, default_config, run

OUTPUT_DIR_ENV = "COUNTERNICHE_OUT"


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def _cell_ref(text: str) -> tuple[str, str, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected algo:function:dim, got {text!r}")
    try:
        dim = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"dim in {text!r} must be an integer")
    return parts[0], parts[1], dim


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="counterniche",
        description="Counter-niching evolutionary optimization and its benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="show registered functions and algorithms")
    p_list.add_argument("--function", help="show a single function entry")
    p_list.add_argument("--json", action="store_true", help="machine-readable output")

    p_run = sub.add_parser("run", help="one engine run, trace written as CSV")
    p_run.add_argument("--algo", required=True, choices=ALGORITHMS)
    p_run.add_argument("--function", required=True, choices=benchmarks.FUNCTION_NAMES)
    p_run.add_argument("--dim", required=True, type=_positive_int)
    p_run.add_argument("--generations", type=_nonneg_int, default=None,
                       help="budget; defaults to the stock schedule for the algo and dim")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", default=None, help="trace CSV path")
    p_run.add_argument("--timing", action="store_true",
                       help="write measured per-generation wall_ms instead of 0")
    p_run.add_argument("--regions-dump", default=None,
                       help="JSONL path for per-generation dense-region dumps (cnea only)")
    p_run.add_argument("--pop-size", type=_positive_int, default=None)
    p_run.add_argument("--elitism", type=_nonneg_int, default=None)
    p_run.add_argument("--p-r", type=float, default=None)
    p_run.add_argument("--p-m", type=float, default=None)
    p_run.add_argument("--p-m-genome", type=float, default=None)
    p_run.add_argument("--sigma-reg", type=float, default=None)
    p_run.add_argument("--grid-bins", type=_positive_int, default=None)
    p_run.add_argument("--tau-dense", type=float, default=None)
    p_run.add_argument("--eps-fit", type=float, default=None)
    p_run.add_argument("--rho-replace", type=float, default=None)
    p_run.add_argument("--sample-budget", type=_positive_int, default=None)
    p_run.add_argument("--sea-variance", choices=("printed", "annealed"), default=None)
    p_run.add_argument("--pow-exponent", type=float, default=None)
    p_run.add_argument("--pow-upper", type=float, default=None)
    p_run.add_argument("--d-low", type=float, default=None)
    p_run.add_argument("--d-high", type=float, default=None)
    p_run.add_argument("--cea-rows", type=_positive_int, default=None)
    p_run.add_argument("--cea-cols", type=_positive_int, default=None)
    p_run.add_argument("--schwefel-lower", type=float, default=None)

    p_sweep = sub.add_parser("sweep", help="run a whole experiment matrix from a config file")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--workers", type=_positive_int, default=None,
                         help="parallel cell workers; defaults to the config value")

    p_sum = sub.add_parser("summarize", help="rank-pick summary rows for every cell in a directory")
    p_sum.add_argument("--in", dest="in_dir", required=True)
    p_sum.add_argument("--json", action="store_true")

    p_tt = sub.add_parser("ttest", help="paired t-test between two cells")
    p_tt.add_argument("--in", dest="in_dir", required=True)
    p_tt.add_argument("--a", dest="cell_a", required=True, type=_cell_ref, metavar="ALGO:FUNCTION:DIM")
    p_tt.add_argument("--b", dest="cell_b", required=True, type=_cell_ref, metavar="ALGO:FUNCTION:DIM")
    p_tt.add_argument("--csv", default=None, help="also write the result as CSV")

    p_div = sub.add_parser("diversity-report", help="average diversity profiles per cell")
    p_div.add_argument("--in", dest="in_dir", required=True)
    p_div.add_argument("--burn-in", type=_nonneg_int, default=None,
                       help="generations ignored at the start; defaults to 5%% of each run's budget")
    p_div.add_argument("--json", action="store_true")

    return parser


_RUN_OVERRIDES = {
    "pop_size": "N",
    "elitism": "elitism_count",
    "p_r": "p_r",
    "p_m": "p_m",
    "p_m_genome": "p_m_genome",
    "sigma_reg": "sigma_reg",
    "grid_bins": "grid_bins",
    "tau_dense": "tau_dense",
    "eps_fit": "eps_fit",
    "rho_replace": "rho_replace",
    "sample_budget": "sample_budget",
    "sea_variance": "sea_variance_mode",
    "pow_exponent": "pow_exponent",
    "pow_upper": "pow_upper",
    "d_low": "d_low",
    "d_high": "d_high",
    "cea_rows": "cea_rows",
    "cea_cols": "cea_cols",
}


def _cmd_list(args) -> int:
    functions = benchmarks.registry()
    if args.function:
        functions = [f for f in functions if f["name"] == args.function]
        if not functions:
            print(f"unknown function {args.function!r}", file=sys.stderr)
            return 1
    algorithms = algorithm_registry() if not args.function else []
    if args.json:
        payload = {"functions": functions}
        if algorithms:
            payload["algorithms"] = algorithms
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print("functions:")
    for f in functions:
        extra = "".join(
            f"  ({f[k]})" for k in ("constraint", "note") if k in f
        )
        print(
            f"  {f['name']:<14} bounds [{f['lower']:g}, {f['upper']:g}]"
            f"  min {f['optimum_value']:g} at {f['optimum_point']}{extra}"
        )
    if algorithms:
        print("algorithms:")
        for a in algorithms:
            print(f"  {a['name']:<6} pop={a['population']}  {a['notes']}")
            print(f"         defaults: {a['defaults']}")
    return 0


def _cmd_run(args) -> int:
    fn = benchmarks.make(args.function, args.dim, schwefel_lower=args.schwefel_lower)
    overrides = {}
    for flag, field in _RUN_OVERRIDES.items():
        value = getattr(args, flag)
        if value is not None:
            overrides[field] = value
    cfg = default_config(
        args.algo, dim=args.dim, generations=args.generations, seed=args.seed, **overrides
    )

    on_regions = None
    dump_handle = None
    if args.regions_dump:
        dump_handle = open(args.regions_dump, "w")

        def on_regions(generation, regions, _fh=dump_handle):
            for r in regions:
                _fh.write(
                    json.dumps(
                        {
                            "generation": generation,
                            "cell_key": list(r.cell_key),
                            "density": r.density,
                            "fitness_mean": r.fitness_mean,
                            "fitness_std": r.fitness_std,
                        }
                    )
                    + "\n"
                )

    try:
        rng = RngStream(args.seed)
        trace = run(cfg, fn, rng, on_regions)
    finally:
        if dump_handle is not None:
            dump_handle.close()

    out = args.out
    if out is None:
        root = os.environ.get(OUTPUT_DIR_ENV, ".")
        out = str(
            Path(root) / f"trace_{args.algo}_{args.function}_{args.dim}d_seed{args.seed}.csv"
        )
    harness.write_trace_csv(trace, out, include_timing=args.timing)
    err = stats.error_value(trace.records[-1].best_fitness, fn.optimum_value)
    print(f"final_error={err:.17g}")
    print(f"trace={out}")
    return 0


def _cmd_sweep(args) -> int:
    matrix = harness.load_matrix_config(args.config)
    env_out = os.environ.get(OUTPUT_DIR_ENV)
    updates = {}
    if env_out:
        updates["output_dir"] = env_out
    if args.workers is not None:
        updates["workers"] = args.workers
    if updates:
        from dataclasses import replace

        matrix = replace(matrix, **updates)
    results = harness.run_matrix(matrix)
    failed = 0
    for cell in results:
        label = f"{cell.algo}:{cell.function}:{cell.dim}"
        if cell.error:
            failed += 1
            print(f"{label}  ERROR  {cell.error}")
        else:
            print(f"{label}  ok  mean_error={cell.summary.mean:.6g}  runs={cell.runs}")
    print(f"output_dir={matrix.output_dir}")
    if failed:
        print(f"{failed} of {len(results)} cells failed", file=sys.stderr)
        return 1
    return 0


def _cmd_summarize(args) -> int:
    cells = harness.discover_cells(args.in_dir)
    if not cells:
        print(f"no cell outputs under {args.in_dir}", file=sys.stderr)
        return 1
    payload = []
    blocks = []
    for algo, function, dim, traces in cells:
        errors = harness.collect_final_errors(traces, function, dim)
        summary = stats.summarize(errors)
        title = f"{algo}  {function}  dim={dim}  runs={summary.n}"
        blocks.append(stats.render_summary_text(title, summary))
        payload.append(
            {
                "algo": algo,
                "function": function,
                "dim": dim,
                "runs": summary.n,
                "best": summary.best,
                "p23": summary.p23,
                "median": summary.median,
                "p73": summary.p73,
                "worst": summary.worst,
                "mean": summary.mean,
                "std": summary.std,
            }
        )
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n\n".join(blocks))
    return 0


def _load_cell_errors(in_dir, ref: tuple[str, str, int]) -> list[float]:
    algo, function, dim = ref
    cdir = harness.cell_dir(in_dir, algo, function, dim)
    traces = sorted(cdir.glob("run*.csv"), key=lambda p: int(p.stem[3:]))
    if not traces:
        raise FileNotFoundError(f"no run traces under {cdir}")
    return harness.collect_final_errors(traces, function, dim)


def _cmd_ttest(args) -> int:
    errors_a = _load_cell_errors(args.in_dir, args.cell_a)
    errors_b = _load_cell_errors(args.in_dir, args.cell_b)
    if len(errors_a) != len(errors_b):
        raise ValueError(
            f"run counts differ: {len(errors_a)} vs {len(errors_b)}; pairing needs equal counts"
        )
    result = stats.paired_ttest(errors_a, errors_b)
    func_label = args.cell_a[1] if args.cell_a[1] == args.cell_b[1] else f"{args.cell_a[1]}/{args.cell_b[1]}"
    dim_label = args.cell_a[2] if args.cell_a[2] == args.cell_b[2] else f"{args.cell_a[2]}/{args.cell_b[2]}"
    row = {
        "function": func_label,
        "dim": dim_label,
        "algo_a": args.cell_a[0],
        "algo_b": args.cell_b[0],
        "t": result.t_statistic,
        "df": result.degrees_of_freedom,
        "p": result.p_value,
    }
    print(stats.render_ttest_text([row]))
    if args.csv:
        import csv as _csv

        with open(args.csv, "w", newline="") as fh:
            w = _csv.writer(fh, lineterminator="\n")
            w.writerow(("function", "dim", "algo_a", "algo_b", "t", "df", "p"))
            w.writerow(
                (
                    row["function"],
                    row["dim"],
                    row["algo_a"],
                    row["algo_b"],
                    f"{result.t_statistic:.17g}",
                    result.degrees_of_freedom,
                    f"{result.p_value:.17g}",
                )
            )
    return 0


def _cmd_diversity_report(args) -> int:
    cells = harness.discover_cells(args.in_dir)
    if not cells:
        print(f"no cell outputs under {args.in_dir}", file=sys.stderr)
        return 1
    rows = []
    for algo, function, dim, traces in cells:
        values = []
        counted = 0
        for path in traces:
            trace = harness.read_trace_csv(path)
            burn = args.burn_in
            if burn is None:
                burn = harness.default_burn_in(trace.generations)
            profile = harness.diversity_profile(trace, burn)
            if profile.average_diversity is not None:
                values.append(profile.average_diversity)
                counted += profile.generations_counted
        avg = sum(values) / len(values) if values else None
        rows.append(
            {
                "algo": algo,
                "function": function,
                "dim": dim,
                "runs_with_signal": len(values),
                "generations_counted": counted,
                "average_diversity": avg,
            }
        )
    if args.json:
        print(json.dumps(rows, indent=2, sort_keys=True))
        return 0
    print(f"{'algo':<6} {'function':<14} {'dim':>4}  {'avg_diversity':>14}  {'runs':>4}")
    for r in rows:
        avg = "n/a" if r["average_diversity"] is None else f"{r['average_diversity']:.6g}"
        print(
            f"{r['algo']:<6} {r['function']:<14} {r['dim']:>4}  {avg:>14}  {r['runs_with_signal']:>4}"
        )
    return 0


_COMMANDS = {
    "list": _cmd_list,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "summarize": _cmd_summarize,
    "ttest": _cmd_ttest,
    "diversity-report": _cmd_diversity_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
