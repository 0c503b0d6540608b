#!/usr/bin/env python3
"""Small-scale head-to-head: the counter-niching engine against the baselines.

Runs every requested algorithm on the same functions, dimensions, and paired
seeds, prints a rank summary per cell, and closes with paired t-tests of the
counter-niching engine against each baseline. Sized for a desk check, not for
a full study: population 100 and a few hundred generations per run.
"""

import argparse
import sys
import time

from counterniche import default_config, make, paired_ttest, run
from counterniche.stats import render_summary_text, render_ttest_text, summarize


def final_errors(algo, function, dim, runs, generations, seed_base):
    fn = make(function, dim)
    errors = []
    for r in range(runs):
        cfg = default_config(
            algo, dim=dim, generations=generations, seed=seed_base + r, N=100
        )
        trace = run(cfg, fn)
        errors.append(trace.best.fitness - fn.optimum_value)
    return errors


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--functions", default="rastrigin,ellipsoid",
                        help="comma-separated function names")
    parser.add_argument("--dim", type=int, default=10)
    parser.add_argument("--algos", default="cnea,sea,socea,dgea",
                        help="first algo is compared against the rest")
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--generations", type=int, default=300)
    parser.add_argument("--seed-base", type=int, default=0)
    args = parser.parse_args(argv)

    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    functions = [f.strip() for f in args.functions.split(",") if f.strip()]
    if len(algos) < 2:
        parser.error("need at least two algorithms to compare")

    t0 = time.perf_counter()
    ttest_rows = []
    for function in functions:
        per_algo = {}
        for algo in algos:
            errors = final_errors(
                algo, function, args.dim, args.runs, args.generations, args.seed_base
            )
            per_algo[algo] = errors
            title = f"{algo}  {function}  dim={args.dim}  runs={args.runs}"
            print(render_summary_text(title, summarize(errors)))
            print()
        lead = algos[0]
        for other in algos[1:]:
            res = paired_ttest(per_algo[lead], per_algo[other])
            ttest_rows.append(
                {
                    "function": function,
                    "dim": args.dim,
                    "algo_a": lead,
                    "algo_b": other,
                    "t": res.t_statistic,
                    "df": res.degrees_of_freedom,
                    "p": res.p_value,
                }
            )

    print(render_ttest_text(ttest_rows))
    print(f"\ntotal {time.perf_counter() - t0:.1f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
