"""Experiment orchestration: run matrices, stagnation detection, diversity
profiles, timing, and CSV persistence.

Outputs are deterministic by default. Per-generation and per-cell wall-clock
columns are written as 0 unless timing is explicitly enabled, so reruns with
the same seeds produce byte-identical files; measured timings always remain
available in memory.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Sequence

from . import benchmarks
from .core import RngStream
from .engines import EngineConfig, GenRecord, RunTrace, default_config, engine_steps, run
from .stats import RunSummary, error_value, summarize

__all__ = [
    "TRACE_FIELDS",
    "SUMMARY_FIELDS",
    "StagnationRule",
    "DiversityProfile",
    "ExperimentMatrix",
    "CellResult",
    "detect_stagnation",
    "run_to_stagnation",
    "diversity_profile",
    "default_burn_in",
    "timed_run",
    "write_trace_csv",
    "read_trace_csv",
    "write_summary_csv",
    "read_summary_csv",
    "cell_dir",
    "discover_cells",
    "collect_final_errors",
    "run_matrix",
    "load_matrix_config",
]

TRACE_FIELDS = (
    "generation",
    "best_fitness",
    "mean_fitness",
    "diversity",
    "mode",
    "victims",
    "replacements",
    "wall_ms",
)

SUMMARY_FIELDS = (
    "algo",
    "function",
    "dim",
    "runs",
    "best",
    "p23",
    "median",
    "p73",
    "worst",
    "mean",
    "std",
    "mean_wall_ms",
    "stagnation_gen_mean",
)


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any double exactly
    return f"{float(x):.17g}"


@dataclass
class StagnationRule:
    window: int = 500

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be positive")


@dataclass
class DiversityProfile:
    average_diversity: float | None
    generations_counted: int
    burn_in: int


def detect_stagnation(trace: RunTrace | Sequence[float], rule: StagnationRule) -> int | None:
    """Smallest generation g with no strict best-fitness improvement anywhere
    in the window of generations ending at g. None if the trace never stalls
    that long."""
    if isinstance(trace, RunTrace):
        series = trace.best_fitness_series()
    else:
        series = [float(v) for v in trace]
    if not series:
        raise ValueError("empty trace")
    last_improvement = 0
    for g in range(1, len(series)):
        if series[g] < series[g - 1]:
            last_improvement = g
        if g - last_improvement >= rule.window:
            return g
    return None


def run_to_stagnation(
    cfg: EngineConfig,
    fn,
    rng: RngStream | None = None,
    rule: StagnationRule | None = None,
    hard_cap: int = 50_000,
) -> RunTrace:
    """Run an engine until its best fitness stalls for a full window, or until
    the hard cap. The returned trace records which terminator fired."""
    if rng is None:
        rng = RngStream(cfg.seed)
    if rule is None:
        rule = StagnationRule()
    steps = engine_steps(cfg, fn, rng)
    records: list[GenRecord] = []
    best = None
    last_improvement = 0
    stopped_by = "cap"
    stagnation_gen: int | None = None
    while True:
        t0 = time.perf_counter()
        rec, best = next(steps)
        rec.wall_ms = (time.perf_counter() - t0) * 1000.0
        records.append(rec)
        g = rec.generation
        if g >= 1 and rec.best_fitness < records[g - 1].best_fitness:
            last_improvement = g
        if g - last_improvement >= rule.window:
            stopped_by = "stagnation"
            stagnation_gen = g
            break
        if g >= hard_cap:
            break
    return RunTrace(records, best, stopped_by, stagnation_gen)


def default_burn_in(generations: int) -> int:
    """Stock burn-in: the first 5% of the generation budget is ignored."""
    return int(0.05 * generations)


def diversity_profile(trace: RunTrace, burn_in: int) -> DiversityProfile:
    """Average diversity over post-burn-in generations where mean fitness
    improved on the previous generation. None when no generation qualifies."""
    records = trace.records
    total = 0.0
    count = 0
    for g in range(1, len(records)):
        rec = records[g]
        if rec.generation <= burn_in:
            continue
        if rec.mean_fitness < records[g - 1].mean_fitness:
            total += rec.diversity
            count += 1
    if count == 0:
        return DiversityProfile(None, 0, burn_in)
    return DiversityProfile(total / count, count, burn_in)


def timed_run(cfg: EngineConfig, fn, rng: RngStream | None = None) -> tuple[RunTrace, float]:
    """Run for the configured budget and report wall-clock milliseconds around
    the loop itself; persistence happens outside the measured span."""
    if rng is None:
        rng = RngStream(cfg.seed)
    t0 = time.perf_counter()
    trace = run(cfg, fn, rng)
    elapsed_ms = (time.perf_counter() - t0) * 1000.0
    return trace, elapsed_ms


def write_trace_csv(trace: RunTrace, path, include_timing: bool = False) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_FIELDS)
        for r in trace.records:
            w.writerow(
                [
                    r.generation,
                    _fmt(r.best_fitness),
                    _fmt(r.mean_fitness),
                    _fmt(r.diversity),
                    r.mode,
                    r.victims,
                    r.replacements,
                    _fmt(r.wall_ms if include_timing else 0.0),
                ]
            )


def read_trace_csv(path) -> RunTrace:
    records: list[GenRecord] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_FIELDS:
            raise ValueError(f"{path} does not look like a trace file")
        for row in reader:
            records.append(
                GenRecord(
                    generation=int(row["generation"]),
                    best_fitness=float(row["best_fitness"]),
                    mean_fitness=float(row["mean_fitness"]),
                    diversity=float(row["diversity"]),
                    mode=row["mode"],
                    victims=int(row["victims"]),
                    replacements=int(row["replacements"]),
                    wall_ms=float(row["wall_ms"]),
                )
            )
    if not records:
        raise ValueError(f"{path} holds no generations")
    return RunTrace(records, None)


def write_summary_csv(
    path,
    algo: str,
    function: str,
    dim: int,
    summary: RunSummary,
    mean_wall_ms: float,
    stagnation_gens: Sequence[int],
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    stag = _fmt(sum(stagnation_gens) / len(stagnation_gens)) if stagnation_gens else ""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_FIELDS)
        w.writerow(
            [
                algo,
                function,
                dim,
                summary.n,
                _fmt(summary.best),
                _fmt(summary.p23),
                _fmt(summary.median),
                _fmt(summary.p73),
                _fmt(summary.worst),
                _fmt(summary.mean),
                _fmt(summary.std),
                _fmt(mean_wall_ms),
                stag,
            ]
        )


def read_summary_csv(path) -> dict:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if len(rows) != 1:
        raise ValueError(f"{path} should hold exactly one summary row")
    return rows[0]


@dataclass
class ExperimentMatrix:
    algos: tuple[str, ...]
    functions: tuple[str, ...]
    dims: tuple[int, ...]
    runs_per_cell: int = 30
    budget: str = "fixed"  # "fixed" or "stagnation"
    generations: int | None = None  # overrides the stock budget when set
    seed_base: int = 0
    output_dir: str = "results"
    stagnation_window: int = 500
    hard_cap: int = 50_000
    workers: int = 1
    timing: bool = False
    schwefel_lower: float | None = None
    engine_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.algos or not self.functions or not self.dims:
            raise ValueError("matrix needs at least one algo, function, and dim")
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be positive")
        if self.budget not in ("fixed", "stagnation"):
            raise ValueError(f"budget must be 'fixed' or 'stagnation', got {self.budget!r}")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class CellResult:
    algo: str
    function: str
    dim: int
    runs: int
    error: str | None = None
    summary: RunSummary | None = None
    trace_paths: list[str] = field(default_factory=list)
    summary_path: str | None = None
    mean_wall_ms: float = 0.0
    stagnation_gens: list[int] = field(default_factory=list)


def cell_dir(base, algo: str, function: str, dim: int) -> Path:
    return Path(base) / algo / function / f"{dim}d"


def _run_cell(matrix: ExperimentMatrix, algo: str, function: str, dim: int) -> CellResult:
    result = CellResult(algo, function, dim, matrix.runs_per_cell)
    try:
        fn = benchmarks.make(function, dim, schwefel_lower=matrix.schwefel_lower)
        overrides = dict(matrix.engine_overrides)
        cfg = default_config(algo, dim=dim, generations=matrix.generations, **overrides)
        out = cell_dir(matrix.output_dir, algo, function, dim)
        out.mkdir(parents=True, exist_ok=True)
        rule = StagnationRule(matrix.stagnation_window)

        errors: list[float] = []
        walls: list[float] = []
        for r in range(matrix.runs_per_cell):
            seed = matrix.seed_base + r
            cfg_r = replace(cfg, seed=seed)
            rng = RngStream(seed)
            if matrix.budget == "stagnation":
                t0 = time.perf_counter()
                trace = run_to_stagnation(cfg_r, fn, rng, rule, matrix.hard_cap)
                elapsed = (time.perf_counter() - t0) * 1000.0
            else:
                trace, elapsed = timed_run(cfg_r, fn, rng)
            path = out / f"run{r}.csv"
            write_trace_csv(trace, path, include_timing=matrix.timing)
            result.trace_paths.append(str(path))
            errors.append(error_value(trace.records[-1].best_fitness, fn.optimum_value))
            walls.append(elapsed)
            stag = (
                trace.stagnation_generation
                if matrix.budget == "stagnation"
                else detect_stagnation(trace, rule)
            )
            if stag is not None:
                result.stagnation_gens.append(stag)

        result.summary = summarize(errors)
        result.mean_wall_ms = sum(walls) / len(walls)
        spath = out / "summary.csv"
        write_summary_csv(
            spath,
            algo,
            function,
            dim,
            result.summary,
            result.mean_wall_ms if matrix.timing else 0.0,
            result.stagnation_gens,
        )
        result.summary_path = str(spath)
    except Exception as exc:  # cell isolation: one bad cell never kills the matrix
        result.error = f"{type(exc).__name__}: {exc}"
    return result


def _cell_task(args) -> CellResult:
    return _run_cell(*args)


def run_matrix(matrix: ExperimentMatrix) -> list[CellResult]:
    """Execute every (algo, function, dim) cell: one trace file per run plus a
    per-cell summary. Failures surface per cell without stopping the rest."""
    cells = list(product(matrix.algos, matrix.functions, matrix.dims))
    tasks = [(matrix, algo, function, dim) for algo, function, dim in cells]
    if matrix.workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=matrix.workers) as pool:
            return list(pool.map(_cell_task, tasks))
    return [_cell_task(t) for t in tasks]


def discover_cells(base) -> list[tuple[str, str, int, list[Path]]]:
    """Find every cell directory under `base` holding run traces.

    Returns (algo, function, dim, trace paths ordered by run index)."""
    base = Path(base)
    cells: dict[tuple[str, str, int], list[Path]] = {}
    for trace in base.glob("*/*/*d/run*.csv"):
        cell = trace.parent
        try:
            dim = int(cell.name[:-1])
            run_idx = int(trace.stem[3:])
        except ValueError:
            continue
        key = (cell.parent.parent.name, cell.parent.name, dim)
        cells.setdefault(key, []).append((run_idx, trace))
    out = []
    for (algo, function, dim), runs in sorted(cells.items()):
        out.append((algo, function, dim, [p for _, p in sorted(runs)]))
    return out


def collect_final_errors(trace_paths: Sequence[Path], function: str, dim: int) -> list[float]:
    """Final best-fitness error of each run, in run-index order."""
    fn = benchmarks.make(function, dim)
    errors = []
    for path in trace_paths:
        trace = read_trace_csv(path)
        errors.append(error_value(trace.records[-1].best_fitness, fn.optimum_value))
    return errors


_MATRIX_INT_KEYS = {
    "runs": "runs_per_cell",
    "seed_base": "seed_base",
    "generations": "generations",
    "stagnation_window": "stagnation_window",
    "hard_cap": "hard_cap",
    "workers": "workers",
}

# engine override keys: config-file name -> (EngineConfig field, parser)
_ENGINE_KEYS = {
    "pop_size": ("N", int),
    "elitism": ("elitism_count", int),
    "p_r": ("p_r", float),
    "p_m": ("p_m", float),
    "p_m_genome": ("p_m_genome", float),
    "sigma_reg": ("sigma_reg", float),
    "grid_bins": ("grid_bins", int),
    "tau_dense": ("tau_dense", float),
    "eps_fit": ("eps_fit", float),
    "rho_replace": ("rho_replace", float),
    "sample_budget": ("sample_budget", int),
    "key_dim_limit": ("key_dim_limit", int),
    "projected_dims": ("projected_dims", int),
    "sea_variance": ("sea_variance_mode", str),
    "pow_exponent": ("pow_exponent", float),
    "pow_upper": ("pow_upper", float),
    "d_low": ("d_low", float),
    "d_high": ("d_high", float),
    "cea_rows": ("cea_rows", int),
    "cea_cols": ("cea_cols", int),
}

_BOOL_VALUES = {"on": True, "true": True, "yes": True, "off": False, "false": False, "no": False}


def load_matrix_config(path) -> ExperimentMatrix:
    """Parse a flat key-value config file ("key = value" lines, # comments).

    Unknown keys are errors. Keys left out fall back to the stock experiment
    setup: 30 runs per cell, fixed budgets, seeds 0..runs-1.
    """
    path = Path(path)
    text = path.read_text()
    fields: dict = {}
    overrides: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "algos":
            fields["algos"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "functions":
            fields["functions"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "dims":
            fields["dims"] = tuple(int(v.strip()) for v in value.split(",") if v.strip())
        elif key == "budget":
            fields["budget"] = value
        elif key == "output_dir":
            fields["output_dir"] = value
        elif key == "timing":
            if value.lower() not in _BOOL_VALUES:
                raise ValueError(f"{path}:{lineno}: timing must be on/off, got {value!r}")
            fields["timing"] = _BOOL_VALUES[value.lower()]
        elif key == "schwefel_lower":
            fields["schwefel_lower"] = float(value)
        elif key in _MATRIX_INT_KEYS:
            fields[_MATRIX_INT_KEYS[key]] = int(value)
        elif key in _ENGINE_KEYS:
            name, parser = _ENGINE_KEYS[key]
            overrides[name] = parser(value)
        else:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    missing = [k for k in ("algos", "functions", "dims") if k not in fields]
    if missing:
        raise ValueError(f"{path}: missing required keys: {', '.join(missing)}")
    return ExperimentMatrix(engine_overrides=overrides, **fields)
