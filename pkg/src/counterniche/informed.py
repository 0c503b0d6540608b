"""Informed genetic operations.

Dense grid regions whose members have collapsed to near-identical fitness are
treated as redundant: their worst members get replaced by evaluated samples
drawn from unoccupied cells, preferring samples far from every region centroid
already handled this generation. The regular variation pipeline then runs on
the whole population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Individual, Population, RngStream, SearchSpace
from .niching import GridIndex, MemoryArchive, Region, archive_mean_distance, archive_push
from .operators import arithmetic_crossover, binary_tournament, gaussian_mutate

__all__ = [
    "InformedOpConfig",
    "VictimRegion",
    "InformedCounters",
    "detect_victims",
    "sample_virgin",
    "select_replacement",
    "informed_mutation",
    "regular_ops",
]


@dataclass
class InformedOpConfig:
    eps_fit: float = 0.01        # relative fitness-spread threshold for redundancy
    rho_replace: float = 0.5     # fraction of a victim region slated for replacement
    sample_budget: int = 20      # virgin samples attempted per replacement slot
    p_r: float = 0.9
    p_m: float = 0.01
    sigma_reg: float = 0.1       # mutation std as a fraction of each coordinate range

    def __post_init__(self):
        if self.eps_fit < 0:
            raise ValueError("eps_fit must be nonnegative")
        if not 0.0 < self.rho_replace < 1.0:
            raise ValueError("rho_replace must lie strictly between 0 and 1")
        if self.sample_budget < 1:
            raise ValueError("sample_budget must be positive")
        for name in ("p_r", "p_m"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.sigma_reg < 0:
            raise ValueError("sigma_reg must be nonnegative")


@dataclass
class VictimRegion:
    region: Region
    replace_indices: list[int]
    keep_indices: list[int]


@dataclass
class InformedCounters:
    victims: int = 0
    replaced: int = 0
    fallbacks: int = 0


def detect_victims(
    regions: list[Region], population: Population, cfg: InformedOpConfig
) -> list[VictimRegion]:
    """Flag regions whose fitness spread is negligible relative to their mean.

    A region is a victim iff fitness_std <= eps_fit * (1 + |fitness_mean|).
    Its worst floor(rho_replace * density) members are slated for replacement
    (fitness ties broken by lower index); regions where that count floors to
    zero are skipped entirely.
    """
    fitness = population.fitness_values()
    victims = []
    for region in regions:
        threshold = cfg.eps_fit * (1.0 + abs(region.fitness_mean))
        if region.fitness_std > threshold:
            continue
        k = math.floor(cfg.rho_replace * region.density)
        if k == 0:
            continue
        order = sorted(region.member_indices, key=lambda i: (-fitness[i], i))
        replace = order[:k]
        chosen = set(replace)
        keep = [i for i in region.member_indices if i not in chosen]
        victims.append(VictimRegion(region, replace, keep))
    return victims


def sample_virgin(
    space: SearchSpace, grid: GridIndex, fn, rng: RngStream, budget: int
) -> list[Individual]:
    """Up to `budget` evaluated uniform samples whose cell key is unoccupied.

    At most 10 * budget raw draws are attempted; heavily occupied grids can
    therefore return fewer samples, or none.
    """
    if budget <= 0:
        return []
    raw = rng.uniform(space.lower, space.upper, size=(10 * budget, space.dim))
    dims = list(grid.effective_dims)
    scaled = np.floor(
        grid.bins_per_dim
        * (raw[:, dims] - space.lower[dims])
        / (space.upper[dims] - space.lower[dims])
    )
    keys = np.clip(scaled, 0, grid.bins_per_dim - 1).astype(int)

    out: list[Individual] = []
    for row, key_row in zip(raw, keys.tolist()):
        if len(out) == budget:
            break
        if tuple(key_row) in grid.cells:
            continue
        out.append(Individual(row, fn.evaluate(row)))
    return out


def select_replacement(
    candidates: list[Individual], victim: VictimRegion, archive: MemoryArchive
) -> Individual | None:
    """Pick the candidate that strictly beats the victim region's mean fitness
    while sitting farthest (on average) from the archived centroids.

    Distance ties fall back to better fitness, then to insertion order.
    Returns None when no candidate qualifies.
    """
    mean = victim.region.fitness_mean
    best: Individual | None = None
    best_dist = -math.inf
    for cand in candidates:
        if not cand.fitness < mean:
            continue
        dist = archive_mean_distance(archive, cand.genome)
        if best is None or dist > best_dist or (dist == best_dist and cand.fitness < best.fitness):
            best = cand
            best_dist = dist
    return best


def informed_mutation(
    population: Population,
    victims: list[VictimRegion],
    space: SearchSpace,
    grid: GridIndex,
    fn,
    archive: MemoryArchive,
    rng: RngStream,
    cfg: InformedOpConfig,
) -> tuple[Population, InformedCounters]:
    """Replace slated members of each victim region with qualifying virgin samples.

    Population size never changes. Slots whose sampling finds no qualifying
    candidate keep their original member and bump the fallback counter.
    Replacements carry their own evaluated fitness; nothing is re-evaluated.
    """
    members = list(population.members)
    counters = InformedCounters(victims=len(victims))
    for victim in victims:
        archive_push(archive, victim.region.centroid)
        for slot in victim.replace_indices:
            candidates = sample_virgin(space, grid, fn, rng, cfg.sample_budget)
            chosen = select_replacement(candidates, victim, archive)
            if chosen is None:
                counters.fallbacks += 1
                continue
            members[slot] = chosen
            counters.replaced += 1
    return Population(members, population.generation), counters


def regular_ops(
    population: Population, space: SearchSpace, fn, rng: RngStream, cfg: InformedOpConfig
) -> Population:
    """Standard variation pass: tournament parents, arithmetic crossover with
    probability p_r, per-gene Gaussian mutation with std sigma_reg * range."""
    std = cfg.sigma_reg * space.widths()
    variance = std * std
    offspring: list[Individual] = []
    for _ in range(population.size):
        p1 = binary_tournament(population, rng)
        p2 = binary_tournament(population, rng)
        crossed = rng.random() < cfg.p_r
        genome = arithmetic_crossover(p1, p2, rng) if crossed else p1.genome
        mutated = gaussian_mutate(genome, variance, cfg.p_m, space, rng)
        if mutated is p1.genome:
            # untouched copy of the first parent keeps its fitness
            offspring.append(p1)
        else:
            offspring.append(Individual(mutated, fn.evaluate(mutated)))
    return Population(offspring, population.generation)
