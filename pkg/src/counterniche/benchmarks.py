"""Analytical test functions: domains, optima, evaluation, and the
paired-coordinate rotation used by the rotated Rastrigin variant.

All seven functions are minimization problems whose optimum value is 0.
Evaluation is pure: no randomness, no state, bit-identical results for
bit-identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SearchSpace

__all__ = [
    "FUNCTION_NAMES",
    "BenchmarkFn",
    "rotation_matrix",
    "make",
    "registry",
]

FUNCTION_NAMES = (
    "ackley",
    "griewank",
    "rastrigin",
    "rosenbrock",
    "ellipsoid",
    "schwefel12",
    "rot_rastrigin",
)

# symmetric half-widths of the default boxes
_HALF_WIDTH = {
    "ackley": 30.0,
    "griewank": 600.0,
    "rastrigin": 5.12,
    "rosenbrock": 100.0,
    "ellipsoid": 5.12,
    "schwefel12": 64.0,
    "rot_rastrigin": 5.12,
}

_TWO_PI = 2.0 * np.pi


def rotation_matrix(dim: int) -> np.ndarray:
    """Block rotation acting on consecutive coordinate pairs.

    Each 2x2 block is [[4/5, 3/5], [-3/5, 4/5]], so the matrix is orthogonal
    and only defined for even dimensions.
    """
    if dim < 2 or dim % 2 != 0:
        raise ValueError(f"rotation matrix needs an even dimension >= 2, got {dim}")
    a = np.zeros((dim, dim))
    first = np.arange(0, dim, 2)
    a[first, first] = 0.8
    a[first, first + 1] = 0.6
    a[first + 1, first + 1] = 0.8
    a[first + 1, first] = -0.6
    return a


def _ackley(x: np.ndarray) -> float:
    n = x.size
    quad = np.sqrt(np.sum(x * x) / n)
    trig = np.sum(np.cos(_TWO_PI * x)) / n
    return float(20.0 + np.e - 20.0 * np.exp(-0.2 * quad) - np.exp(trig))


def _griewank(x: np.ndarray) -> float:
    # shifted variant: the minimum sits at every coordinate equal to 100
    z = x - 100.0
    i = np.arange(1, x.size + 1, dtype=float)
    return float(np.sum(z * z) / 4000.0 - np.prod(np.cos(z / np.sqrt(i))) + 1.0)


def _rastrigin(x: np.ndarray) -> float:
    return float(np.sum(x * x - 10.0 * np.cos(_TWO_PI * x) + 10.0))


def _rosenbrock(x: np.ndarray) -> float:
    a = x[:-1]
    b = x[1:]
    return float(np.sum(100.0 * (b - a * a) ** 2 + (a - 1.0) ** 2))


def _ellipsoid(x: np.ndarray) -> float:
    i = np.arange(1, x.size + 1, dtype=float)
    return float(np.sum(i * x * x))


def _schwefel12(x: np.ndarray) -> float:
    partial = np.cumsum(x)
    return float(np.sum(partial * partial))


_EVALUATORS = {
    "ackley": _ackley,
    "griewank": _griewank,
    "rastrigin": _rastrigin,
    "rosenbrock": _rosenbrock,
    "ellipsoid": _ellipsoid,
    "schwefel12": _schwefel12,
}


@dataclass(frozen=True, eq=False)
class BenchmarkFn:
    """One instantiated test function: space, optimum, and the evaluator."""

    name: str
    dim: int
    space: SearchSpace
    optimum_point: np.ndarray
    optimum_value: float
    rotation: np.ndarray | None = None

    def evaluate(self, x) -> float:
        g = np.asarray(x, dtype=float)
        if g.shape != (self.dim,):
            raise ValueError(f"{self.name} expects shape ({self.dim},), got {g.shape}")
        if self.name == "rot_rastrigin":
            return _rastrigin(self.rotation @ g)
        return _EVALUATORS[self.name](g)

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def optimum(self) -> tuple[np.ndarray, float]:
        return self.optimum_point, self.optimum_value


def make(name: str, dim: int, schwefel_lower: float | None = None) -> BenchmarkFn:
    """Instantiate a named function at a given dimensionality.

    `schwefel_lower` overrides the lower bound of schwefel12 only; the default
    box is the symmetric [-64, 64].
    """
    if name not in FUNCTION_NAMES:
        raise ValueError(f"unknown function {name!r}; known: {', '.join(FUNCTION_NAMES)}")
    if dim < 1:
        raise ValueError(f"dim must be positive, got {dim}")

    half = _HALF_WIDTH[name]
    lower, upper = -half, half
    if name == "schwefel12" and schwefel_lower is not None:
        lower = float(schwefel_lower)
        if lower >= upper:
            raise ValueError(f"schwefel_lower {lower} must stay below the upper bound {upper}")
    space = SearchSpace.cube(dim, lower, upper)

    rotation = None
    if name == "rot_rastrigin":
        rotation = rotation_matrix(dim)  # raises for odd dim
        rotation.setflags(write=False)

    if name == "rosenbrock":
        point = np.ones(dim)
    elif name == "griewank":
        point = np.full(dim, 100.0)
    else:
        point = np.zeros(dim)
    point.setflags(write=False)

    return BenchmarkFn(name, dim, space, point, 0.0, rotation)


def registry() -> list[dict]:
    """Static description of every function, for listings and tooling."""
    out = []
    for name in FUNCTION_NAMES:
        half = _HALF_WIDTH[name]
        if name == "rosenbrock":
            where = "all coordinates 1"
        elif name == "griewank":
            where = "all coordinates 100"
        else:
            where = "all coordinates 0"
        entry = {
            "name": name,
            "lower": -half,
            "upper": half,
            "optimum_value": 0.0,
            "optimum_point": where,
        }
        if name == "rot_rastrigin":
            entry["constraint"] = "even dimension required"
        if name == "schwefel12":
            entry["note"] = "lower bound configurable"
        out.append(entry)
    return out
