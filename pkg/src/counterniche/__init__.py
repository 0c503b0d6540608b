"""Counter-niching evolutionary optimization.

A real-coded EA that fights premature convergence by pseudo-niching the
population on a coarse grid and replacing redundant members of converged
dense regions with informed samples from unexplored cells, plus four
baseline EAs, seven benchmark functions, diversity measures, and an
experiment harness with rank summaries and paired t-tests.
"""

from .benchmarks import FUNCTION_NAMES, BenchmarkFn, make, rotation_matrix
from .core import Individual, Population, RngStream, SearchSpace, clamp, random_genome
from .diversity import degree_of_diversity, distance_to_average, fitness_std, maturity
from .engines import (
    ALGORITHMS,
    EngineConfig,
    GenRecord,
    RunTrace,
    default_config,
    default_generations,
    run,
    run_cea,
    run_cnea,
    run_dgea,
    run_sea,
    run_socea,
)
from .harness import (
    ExperimentMatrix,
    StagnationRule,
    detect_stagnation,
    diversity_profile,
    run_matrix,
    run_to_stagnation,
    timed_run,
)
from .informed import (
    InformedOpConfig,
    detect_victims,
    informed_mutation,
    regular_ops,
    sample_virgin,
    select_replacement,
)
from .niching import (
    GridIndex,
    MemoryArchive,
    Region,
    archive_mean_distance,
    archive_push,
    build_grid,
    high_density_regions,
)
from .operators import arithmetic_crossover, binary_tournament, gaussian_mutate, pow_sample
from .stats import RunSummary, TTestResult, error_value, paired_ttest, summarize

__version__ = "0.1.0"
