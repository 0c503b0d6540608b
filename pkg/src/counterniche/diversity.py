"""Population diversity measures.

Two views of the same population: a normalized spatial spread over real
genomes (mean distance to the population average, scaled by the box diagonal)
and a locus-level count of polymorphic positions over discretized rows.
"""

from __future__ import annotations

from typing import Hashable, Sequence

import numpy as np

from .core import Individual, Population, SearchSpace

__all__ = [
    "distance_to_average",
    "degree_of_diversity",
    "maturity",
    "fitness_std",
]


def distance_to_average(population: Population, space: SearchSpace) -> float:
    """Mean Euclidean distance to the average genome, normalized to [0, 1].

    The normalizer is the diagonal of the search box, so identical
    populations score exactly 0 and no population can exceed 1.
    """
    x = population.genomes()
    if x.shape[1] != space.dim:
        raise ValueError(f"genomes have dim {x.shape[1]}, space has dim {space.dim}")
    if np.all(x == x[0]):
        # short-circuit keeps the fully converged case exact; the float mean
        # of n identical rows can be off by an ulp for non-power-of-two n
        return 0.0
    centered = x - x.mean(axis=0)
    dists = np.sqrt(np.sum(centered * centered, axis=1))
    return float(np.sum(dists) / (space.diagonal() * x.shape[0]))


def _validated_rows(rows: Sequence[Sequence[Hashable]]) -> list[Sequence[Hashable]]:
    rows = list(rows)
    if not rows:
        raise ValueError("need at least one row")
    width = len(rows[0])
    if width < 1:
        raise ValueError("rows must have at least one locus")
    if any(len(r) != width for r in rows):
        raise ValueError("rows must all share the same length")
    return rows


def degree_of_diversity(rows: Sequence[Sequence[Hashable]]) -> int:
    """Number of loci carrying more than one distinct symbol.

    Rows may be strings or any equal-length sequences of hashable symbols,
    e.g. tuples of grid bin indices.

    >>> degree_of_diversity(["000", "011"])
    2
    >>> degree_of_diversity(["101", "101", "101"])
    0
    >>> degree_of_diversity(["01", "10"])
    2
    """
    rows = _validated_rows(rows)
    width = len(rows[0])
    return sum(1 for j in range(width) if len({r[j] for r in rows}) > 1)


def maturity(rows: Sequence[Sequence[Hashable]]) -> int:
    """Count of converged loci: row length minus the degree of diversity.

    >>> maturity(["000", "011"])
    1
    >>> maturity(["101", "101"])
    3
    >>> maturity(["01", "10"])
    0
    """
    rows = _validated_rows(rows)
    return len(rows[0]) - degree_of_diversity(rows)


def fitness_std(members: Sequence[Individual]) -> float:
    """Population (not sample) standard deviation of member fitness."""
    if not members:
        raise ValueError("need at least one member")
    vals = [m.fitness for m in members]
    if any(v is None for v in vals):
        raise ValueError("all members must be evaluated")
    return float(np.std(np.asarray(vals, dtype=float)))
