"""Capacity of N-helix innovation systems.

Capacity is ``mean_weight * phase_measure * fractal_factor``. The fractal
factor comes from a Koch-type geometric series: for three helices each
iteration adds terms ``(3/beta) (5/beta)^(j-1)`` of the base triangle area,
for four helices ``(4/gamma) (7/gamma)^(j-1)`` of the base tetrahedron
volume. Both series converge only for ``beta > 5`` and ``gamma > 7``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DivergenceError, DomainError

DEFAULT_MEAN_WEIGHT = 1.0
DEFAULT_BETA = 6.3
DEFAULT_GAMMA = 8.0

# (first-term numerator, common-ratio numerator) of each series
_KOCH2D = (3.0, 5.0)
_KOCH3D = (4.0, 7.0)

MAX_PREFRACTAL = 8


@dataclass(frozen=True)
class CapacityParams:
    mean_weight: float = DEFAULT_MEAN_WEIGHT
    helix_count: int = 3
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if not self.mean_weight > 0:
            raise DomainError(f"mean_weight must be positive, got {self.mean_weight}")
        if self.helix_count not in (1, 2, 3, 4):
            raise DomainError(f"helix_count must be 1-4, got {self.helix_count}")
        if not self.beta > 5:
            raise DivergenceError(f"beta must exceed 5 (common ratio 5/beta < 1), got {self.beta}")
        if not self.gamma > 7:
            raise DivergenceError(f"gamma must exceed 7 (common ratio 7/gamma < 1), got {self.gamma}")


@dataclass(frozen=True)
class SeriesResult:
    partial_sums: list
    closed_form: float
    total_factor: float
    converged: bool
    first_term: float
    ratio: float

    def to_dict(self):
        return asdict(self)


def phase_measure(helix_count):
    """Bare phase-space measure: point, quarter arc, octant triangle, or orthant tetrahedron."""
    if helix_count == 1:
        return 1.0
    if helix_count in (2, 3):
        return math.pi / 2
    if helix_count == 4:
        return math.pi**2 / 8
    raise DomainError(f"helix_count must be 1-4, got {helix_count}")


def _geometric(a, q, denom, n_iterations, name):
    if n_iterations < 1:
        raise DomainError("n_iterations must be at least 1")
    if not denom > q:
        raise DivergenceError(f"{name} = {denom} gives common ratio {q}/{name} >= 1; the series diverges")
    first = a / denom
    r = q / denom
    terms = first * r ** np.arange(n_iterations)
    partial = np.cumsum(terms).tolist()
    closed = a / (denom - q)
    return SeriesResult(partial, closed, 1.0 + closed, True, first, r)


def koch2d_series(beta, n_iterations=40):
    """Area surplus of the triangle series, in units of the base triangle."""
    return _geometric(*_KOCH2D, beta, n_iterations, "beta")


def koch3d_series(gamma, n_iterations=40):
    """Volume surplus of the tetrahedron series, in units of the base tetrahedron."""
    return _geometric(*_KOCH3D, gamma, n_iterations, "gamma")


def fractal_factor(params):
    if params.helix_count == 3:
        return koch2d_series(params.beta, 1).total_factor
    if params.helix_count == 4:
        return koch3d_series(params.gamma, 1).total_factor
    return 1.0


def capacity(params):
    return params.mean_weight * phase_measure(params.helix_count) * fractal_factor(params)


def capacity_table(mean_weight=DEFAULT_MEAN_WEIGHT, beta=DEFAULT_BETA, gamma=DEFAULT_GAMMA):
    """Capacities P1..P4 and their successive ratios for one parameter set."""
    caps = {n: capacity(CapacityParams(mean_weight, n, beta, gamma)) for n in (1, 2, 3, 4)}
    return {
        "capacities": {f"P{n}": v for n, v in caps.items()},
        "ratios": {f"P{n + 1}/P{n}": caps[n + 1] / caps[n] for n in (1, 2, 3)},
    }


def max_iteration_ratio(helix_count):
    """Largest next-to-previous size ratio (1/beta or 1/gamma) that keeps the series finite."""
    if helix_count == 3:
        return 1 / _KOCH2D[1]
    if helix_count == 4:
        return 1 / _KOCH3D[1]
    raise DomainError(f"no fractal series for helix_count={helix_count}; expected 3 or 4")


def koch2d_prefractal(n):
    """Vertex loop (counter-clockwise, not closed) of the n-th Koch pre-fractal.

    Starts from the unit equilateral triangle with a vertex at the origin;
    every edge of the result has length ``3**-n``.
    """
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= MAX_PREFRACTAL:
        raise DomainError(f"pre-fractal order must be an integer in 0..{MAX_PREFRACTAL}, got {n!r}")
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    c, s = 0.5, -math.sqrt(3) / 2  # rotation by -60 degrees puts bumps outside a CCW loop
    for _ in range(n):
        a = pts
        d = (np.roll(pts, -1, axis=0) - a) / 3
        p1 = a + d
        bump = np.column_stack([c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]])
        peak = p1 + bump
        p2 = a + 2 * d
        pts = np.stack([a, p1, peak, p2], axis=1).reshape(-1, 2)
    return pts


def prefractal_area(n):
    """Closed-form area of pre-fractal ``n`` relative to the base triangle."""
    return 1.0 + sum((3 / 9) * (4 / 9) ** j for j in range(n))
