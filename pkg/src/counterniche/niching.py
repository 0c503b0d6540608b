"""Grid pseudo-niching: coarse occupancy clustering without distance thresholds.

The population is dropped into a per-dimension grid; every occupied cell is a
cluster, and cells holding enough members count as high-density regions. A
small per-generation archive of region centroids lets the replacement step
prefer samples far from everything already explored this generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Population, RngStream, SearchSpace

__all__ = [
    "DEFAULT_BINS",
    "DEFAULT_DENSITY_FRACTION",
    "DEFAULT_KEY_DIM_LIMIT",
    "DEFAULT_PROJECTED_DIMS",
    "GridIndex",
    "Region",
    "MemoryArchive",
    "bin_indices",
    "choose_key_dims",
    "build_grid",
    "high_density_regions",
    "archive_push",
    "archive_mean_distance",
    "discretize_genomes",
]

DEFAULT_BINS = 4
DEFAULT_DENSITY_FRACTION = 0.05
# above this dimensionality, cell keys use a fixed random subset of dimensions
DEFAULT_KEY_DIM_LIMIT = 10
DEFAULT_PROJECTED_DIMS = 10


def bin_indices(points, space: SearchSpace, bins: int) -> np.ndarray:
    """Per-coordinate bin index; the upper bound folds into the last bin."""
    pts = np.asarray(points, dtype=float)
    scaled = np.floor(bins * (pts - space.lower) / (space.upper - space.lower))
    return np.clip(scaled, 0, bins - 1).astype(int)


def choose_key_dims(
    dim: int,
    rng: RngStream,
    limit: int = DEFAULT_KEY_DIM_LIMIT,
    projected: int = DEFAULT_PROJECTED_DIMS,
) -> tuple[int, ...]:
    """Dimensions used for cell keys. Drawn once per run when dim exceeds the limit."""
    if dim <= limit:
        return tuple(range(dim))
    return rng.index_subset(dim, projected)


@dataclass
class GridIndex:
    """Occupancy map from cell key (tuple of bin indices) to member indices."""

    bins_per_dim: int
    effective_dims: tuple[int, ...]
    cells: dict[tuple[int, ...], list[int]]
    space: SearchSpace

    def key_of(self, genome) -> tuple[int, ...]:
        g = np.asarray(genome, dtype=float)
        dims = list(self.effective_dims)
        scaled = np.floor(
            self.bins_per_dim
            * (g[dims] - self.space.lower[dims])
            / (self.space.upper[dims] - self.space.lower[dims])
        )
        clipped = np.clip(scaled, 0, self.bins_per_dim - 1).astype(int)
        return tuple(int(v) for v in clipped)

    def is_occupied(self, key: tuple[int, ...]) -> bool:
        return key in self.cells


def build_grid(
    population: Population,
    space: SearchSpace,
    bins: int = DEFAULT_BINS,
    rng: RngStream | None = None,
    key_dims: tuple[int, ...] | None = None,
    key_dim_limit: int = DEFAULT_KEY_DIM_LIMIT,
    projected_dims: int = DEFAULT_PROJECTED_DIMS,
) -> GridIndex:
    """Index every member by its cell key.

    Callers that run many generations should draw `key_dims` once and pass it
    in, so high-dimensional runs keep a stable projection.
    """
    if bins < 2:
        raise ValueError(f"need at least 2 bins per dimension, got {bins}")
    if key_dims is None:
        if space.dim <= key_dim_limit:
            key_dims = tuple(range(space.dim))
        else:
            if rng is None:
                raise ValueError("rng is required to draw projected key dimensions")
            key_dims = choose_key_dims(space.dim, rng, key_dim_limit, projected_dims)

    x = population.genomes()
    dims = list(key_dims)
    sub_lower = space.lower[dims]
    sub_upper = space.upper[dims]
    scaled = np.floor(bins * (x[:, dims] - sub_lower) / (sub_upper - sub_lower))
    keys = np.clip(scaled, 0, bins - 1).astype(int)

    cells: dict[tuple[int, ...], list[int]] = {}
    for i, row in enumerate(keys.tolist()):
        cells.setdefault(tuple(row), []).append(i)
    return GridIndex(bins, tuple(key_dims), cells, space)


@dataclass
class Region:
    """One occupied cell dense enough to count: members, centroid, fitness stats."""

    cell_key: tuple[int, ...]
    member_indices: list[int]
    centroid: np.ndarray
    density: int
    fitness_mean: float
    fitness_std: float


def high_density_regions(
    grid: GridIndex,
    population: Population,
    density_fraction: float = DEFAULT_DENSITY_FRACTION,
) -> list[Region]:
    """Occupied cells holding at least max(2, ceil(fraction * N)) members.

    Sorted densest first; ties broken by lower mean fitness, then by cell key.
    """
    n = population.size
    threshold = max(2, math.ceil(density_fraction * n))
    x = population.genomes()
    fitness = population.fitness_values()

    regions = []
    for key, idxs in grid.cells.items():
        if len(idxs) < threshold:
            continue
        f = fitness[idxs]
        regions.append(
            Region(
                cell_key=key,
                member_indices=list(idxs),
                centroid=x[idxs].mean(axis=0),
                density=len(idxs),
                fitness_mean=float(f.mean()),
                fitness_std=float(f.std()),
            )
        )
    regions.sort(key=lambda r: (-r.density, r.fitness_mean, r.cell_key))
    return regions


@dataclass
class MemoryArchive:
    """Centroids of regions processed so far in the current generation."""

    centroids: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.centroids)

    def clear(self) -> None:
        self.centroids.clear()


def archive_push(archive: MemoryArchive, centroid) -> MemoryArchive:
    archive.centroids.append(np.asarray(centroid, dtype=float))
    return archive


def archive_mean_distance(archive: MemoryArchive, x) -> float:
    """Mean Euclidean distance from x to the archived centroids.

    An empty archive returns +inf, which outranks any finite distance and
    makes the first region's replacements prefer fitness alone.
    """
    if not archive.centroids:
        return math.inf
    point = np.asarray(x, dtype=float)
    stacked = np.stack(archive.centroids)
    if stacked.shape[1] != point.shape[0]:
        raise ValueError(
            f"archive centroids have dim {stacked.shape[1]}, point has dim {point.shape[0]}"
        )
    diffs = stacked - point
    return float(np.mean(np.sqrt(np.sum(diffs * diffs, axis=1))))


def discretize_genomes(
    population: Population, space: SearchSpace, bins: int = DEFAULT_BINS
) -> list[tuple[int, ...]]:
    """Full-dimension bin-index rows, suitable for the locus diversity measures."""
    keys = bin_indices(population.genomes(), space, bins)
    return [tuple(int(v) for v in row) for row in keys.tolist()]
