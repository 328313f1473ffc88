"""Intersection of two lines given in foot-point polar form.

For lines ``x cos(t_i) + y sin(t_i) = l_i`` the intersection lies at squared
distance

    r^2 = (l1^2 + l2^2 - 2 l1 l2 cos(t2 - t1)) / sin(t2 - t1)^2

from the origin.  The numerator is evaluated as
``(l1 - l2)^2 + 4 l1 l2 sin^2((t2 - t1)/2)``, which cannot go negative by
cancellation when both distances are non-negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import CoincidentLinesError, DomainError, ParallelLinesError
from .measures import PolarLine, normalize_angle

PARALLEL_TOL = 1e-12


@dataclass(frozen=True)
class PlanarPoint:
    r: float
    theta: float

    def __post_init__(self):
        if not self.r >= 0.0:
            raise DomainError(f"radius must be >= 0, got {self.r}")
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @property
    def xy(self) -> tuple[float, float]:
        return (self.r * math.cos(self.theta), self.r * math.sin(self.theta))


@numba.njit(cache=True, inline="always")
def squared_distance_terms(d1, d2, cos_delta, sin_delta):
    """Numerator and denominator of the squared intersection distance.

    Works for signed distances as well; compiled so the polygon enumeration
    kernels can call it per pair without leaving machine code.
    """
    return d1 * d1 + d2 * d2 - 2.0 * d1 * d2 * cos_delta, sin_delta * sin_delta


def _check_parallel(l1: PolarLine, l2: PolarLine, s: float, delta: float) -> None:
    if abs(s) < PARALLEL_TOL:
        # the second normal may point the opposite way, flipping its offset
        offset2 = l2.dist if math.cos(delta) > 0 else -l2.dist
        if abs(l1.dist - offset2) <= PARALLEL_TOL:
            raise CoincidentLinesError(f"lines {l1} and {l2} coincide")
        raise ParallelLinesError(f"lines {l1} and {l2} are parallel")


def intersect(l1: PolarLine, l2: PolarLine) -> PlanarPoint:
    """Intersection point of two non-parallel lines."""
    delta = l2.foot_angle - l1.foot_angle
    s = math.sin(delta)
    _check_parallel(l1, l2, s, delta)
    s1, c1 = math.sin(l1.foot_angle), math.cos(l1.foot_angle)
    s2, c2 = math.sin(l2.foot_angle), math.cos(l2.foot_angle)
    x = (l1.dist * s2 - l2.dist * s1) / s
    y = (l2.dist * c1 - l1.dist * c2) / s
    return PlanarPoint(distance_only(l1, l2), math.atan2(y, x))


def distance_only(l1: PolarLine, l2: PolarLine) -> float:
    """Distance from the origin to the intersection of ``l1`` and ``l2``."""
    delta = l2.foot_angle - l1.foot_angle
    s = math.sin(delta)
    _check_parallel(l1, l2, s, delta)
    a, b = l1.dist, l2.dist
    half = math.sin(0.5 * delta)
    return math.sqrt((a - b) ** 2 + 4.0 * a * b * half * half) / abs(s)


def distances(d1, t1, d2, t2, parallel_tol: float = PARALLEL_TOL):
    """Vectorized :func:`distance_only`.

    Returns ``(r, parallel)`` where ``parallel`` flags pairs with
    ``|sin(t2 - t1)| < parallel_tol``; their ``r`` entries are NaN.
    """
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    delta = np.asarray(t2, dtype=float) - np.asarray(t1, dtype=float)
    s = np.abs(np.sin(delta))
    half = np.sin(0.5 * delta)
    parallel = s < parallel_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt((d1 - d2) ** 2 + 4.0 * d1 * d2 * half * half) / s
    return np.where(parallel, np.nan, r), parallel
