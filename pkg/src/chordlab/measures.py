"""Rotationally invariant random lines.

A random line is described by the foot of the perpendicular from the origin:
its distance ``dist`` follows a radial law and its angle ``foot_angle`` is
uniform on ``[0, 2*pi)`` and independent of the distance.  The line itself is
``{(x, y) : x cos(foot_angle) + y sin(foot_angle) = dist}``.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import AtomError, DegenerateChordError, DomainError

TWO_PI = 2.0 * math.pi

# a tabulated CDF may start with at most this much mass at its first grid point
ATOM_TOL = 1e-9


class MeasureName(str, enum.Enum):
    UNIFORM_RADIUS = "UniformRadius"
    UNIFORM_MIDPOINT = "UniformMidpoint"
    UNIFORM_ENDPOINTS = "UniformEndpoints"
    RAYLEIGH = "Rayleigh"
    CUSTOM = "Custom"


_ALIASES = {
    "radius": MeasureName.UNIFORM_RADIUS,
    "uniformradius": MeasureName.UNIFORM_RADIUS,
    "i": MeasureName.UNIFORM_RADIUS,
    "midpoint": MeasureName.UNIFORM_MIDPOINT,
    "uniformmidpoint": MeasureName.UNIFORM_MIDPOINT,
    "ii": MeasureName.UNIFORM_MIDPOINT,
    "endpoints": MeasureName.UNIFORM_ENDPOINTS,
    "uniformendpoints": MeasureName.UNIFORM_ENDPOINTS,
    "iii": MeasureName.UNIFORM_ENDPOINTS,
    "rayleigh": MeasureName.RAYLEIGH,
    "gaussian": MeasureName.RAYLEIGH,
    "iv": MeasureName.RAYLEIGH,
    "custom": MeasureName.CUSTOM,
}


def resolve_name(name) -> MeasureName:
    """Accept an enum member, its value, or a short alias such as ``"endpoints"``."""
    if isinstance(name, MeasureName):
        return name
    key = str(name).replace("_", "").replace("-", "").replace(" ", "").lower()
    try:
        return _ALIASES[key]
    except KeyError:
        raise DomainError(f"unknown measure {name!r}") from None


def normalize_angle(theta: float) -> float:
    """Reduce an angle to ``[0, 2*pi)``."""
    out = math.fmod(theta, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    if out >= TWO_PI:
        out = 0.0
    return out


def normalize_angles(theta) -> np.ndarray:
    out = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


@dataclass(frozen=True)
class PolarLine:
    """A line given by the polar coordinates of its foot point."""

    dist: float
    foot_angle: float

    def __post_init__(self):
        if not self.dist >= 0.0:
            raise DomainError(f"line distance must be >= 0, got {self.dist}")
        object.__setattr__(self, "dist", float(self.dist))
        object.__setattr__(self, "foot_angle", normalize_angle(float(self.foot_angle)))

    @property
    def foot(self) -> tuple[float, float]:
        return (self.dist * math.cos(self.foot_angle), self.dist * math.sin(self.foot_angle))

    def residual(self, x: float, y: float) -> float:
        """Signed offset of ``(x, y)`` from the line along its unit normal."""
        return x * math.cos(self.foot_angle) + y * math.sin(self.foot_angle) - self.dist


@dataclass(frozen=True)
class RadialMeasure:
    """Law of the foot distance of a random line.

    ``cdf``, ``pdf`` and ``inv_cdf`` are vectorized over numpy arrays.
    ``table`` is set only for tabulated (custom) measures and holds the
    ``(t, F)`` knots of the piecewise-linear CDF, starting at ``t = 0``.
    """

    name: MeasureName
    cdf: Callable
    pdf: Callable
    inv_cdf: Callable
    support_upper: float
    table: Optional[tuple] = field(default=None, compare=False, repr=False)
    label: str = ""

    @property
    def display_name(self) -> str:
        return self.label or self.name.value


# ---------------------------------------------------------------------------
# built-ins


def _radius_cdf(t):
    return np.clip(np.asarray(t, dtype=float), 0.0, 1.0)


def _radius_pdf(t):
    t = np.asarray(t, dtype=float)
    return np.where((t >= 0) & (t <= 1), 1.0, 0.0)


def _radius_inv(u):
    return np.asarray(u, dtype=float) * 1.0


def _midpoint_cdf(t):
    return _radius_cdf(t) ** 2


def _midpoint_pdf(t):
    t = np.asarray(t, dtype=float)
    return np.where((t >= 0) & (t <= 1), 2.0 * t, 0.0)


def _midpoint_inv(u):
    return np.sqrt(np.asarray(u, dtype=float))


def _endpoints_cdf(t):
    return (2.0 / math.pi) * np.arcsin(_radius_cdf(t))


def _endpoints_pdf(t):
    t = np.asarray(t, dtype=float)
    inside = (t >= 0) & (t < 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 2.0 / (math.pi * np.sqrt((1.0 - t) * (1.0 + t)))
    return np.where(inside, val, 0.0)


def _endpoints_inv(u):
    return np.sin(0.5 * math.pi * np.asarray(u, dtype=float))


def _rayleigh_cdf(t):
    t = np.maximum(np.asarray(t, dtype=float), 0.0)
    return -np.expm1(-0.5 * t * t)


def _rayleigh_pdf(t):
    t = np.asarray(t, dtype=float)
    return np.where(t >= 0, t * np.exp(-0.5 * t * t), 0.0)


def _rayleigh_inv(u):
    with np.errstate(divide="ignore"):
        return np.sqrt(-2.0 * np.log1p(-np.asarray(u, dtype=float)))


_BUILTINS = {
    MeasureName.UNIFORM_RADIUS: (_radius_cdf, _radius_pdf, _radius_inv, 1.0),
    MeasureName.UNIFORM_MIDPOINT: (_midpoint_cdf, _midpoint_pdf, _midpoint_inv, 1.0),
    MeasureName.UNIFORM_ENDPOINTS: (_endpoints_cdf, _endpoints_pdf, _endpoints_inv, 1.0),
    MeasureName.RAYLEIGH: (_rayleigh_cdf, _rayleigh_pdf, _rayleigh_inv, math.inf),
}


def builtin(name) -> RadialMeasure:
    """One of the four built-in radial laws.

    ========================  =========================  ===========
    name                      CDF                        support
    ========================  =========================  ===========
    UniformRadius             ``r``                      ``[0, 1]``
    UniformMidpoint           ``r^2``                    ``[0, 1]``
    UniformEndpoints          ``(2/pi) arcsin r``        ``[0, 1]``
    Rayleigh                  ``1 - exp(-r^2/2)``        ``[0, inf)``
    ========================  =========================  ===========
    """
    key = resolve_name(name)
    if key not in _BUILTINS:
        raise DomainError(f"{key.value} is not a built-in measure; use tabulated()")
    cdf, pdf, inv, upper = _BUILTINS[key]
    return RadialMeasure(key, cdf, pdf, inv, upper)


# ---------------------------------------------------------------------------
# tabulated custom measures


def tabulated(t, F, label: str = "") -> RadialMeasure:
    """Piecewise-linear CDF through the knots ``(t[i], F[i])``.

    ``t`` must be strictly increasing and non-negative, ``F`` nondecreasing in
    ``[0, 1]`` and ending at 1.  When ``t[0] > 0`` the CDF is interpolated
    from ``(0, 0)``; when ``t[0] == 0`` the value ``F[0]`` would be a point
    mass at the origin and must not exceed ``ATOM_TOL``.
    """
    t = np.array(t, dtype=float)
    F = np.array(F, dtype=float)
    if t.ndim != 1 or t.shape != F.shape or t.size < 1:
        raise DomainError("t and F must be 1-d arrays of equal non-zero length")
    if np.any(~np.isfinite(t)) or np.any(~np.isfinite(F)):
        raise DomainError("tabulated CDF contains non-finite values")
    if t[0] < 0 or np.any(np.diff(t) <= 0):
        raise DomainError("t must be non-negative and strictly increasing")
    if np.any(F < 0) or np.any(F > 1 + 1e-12) or np.any(np.diff(F) < 0):
        raise DomainError("F must be nondecreasing within [0, 1]")
    if abs(F[-1] - 1.0) > 1e-12:
        raise DomainError(f"tabulated CDF must reach 1, last value is {F[-1]!r}")
    F[-1] = 1.0
    if t[0] > 0:
        t = np.concatenate(([0.0], t))
        F = np.concatenate(([0.0], F))
    elif F[0] > ATOM_TOL:
        raise AtomError(f"tabulated CDF has an atom of mass {F[0]} at t = 0")
    else:
        F[0] = 0.0
    upper = float(t[np.argmax(F >= 1.0)])
    slopes = np.diff(F) / np.diff(t)

    def cdf(x):
        return np.interp(np.asarray(x, dtype=float), t, F, left=0.0, right=1.0)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        i = np.searchsorted(t, x, side="right") - 1
        inside = (i >= 0) & (i < slopes.size)
        return np.where(inside, slopes[np.clip(i, 0, slopes.size - 1)], 0.0)

    def inv_cdf(u):
        u = np.asarray(u, dtype=float)
        # generalized inverse: smallest x with F(x) >= u
        j = np.clip(np.searchsorted(F, u, side="left"), 1, F.size - 1)
        lo, hi = F[j - 1], F[j]
        frac = np.where(hi > lo, (u - lo) / np.where(hi > lo, hi - lo, 1.0), 0.0)
        return np.where(u <= 0.0, 0.0, t[j - 1] + frac * (t[j] - t[j - 1]))

    return RadialMeasure(MeasureName.CUSTOM, cdf, pdf, inv_cdf, upper, table=(t, F), label=label)


def load_tabulated(path, label: Optional[str] = None) -> RadialMeasure:
    """Read a ``t,F`` CSV file into a tabulated measure."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["t", "F"]:
            raise DomainError(f"{path}: expected header 't,F', got {reader.fieldnames}")
        rows = [(float(row["t"]), float(row["F"])) for row in reader]
    if not rows:
        raise DomainError(f"{path}: no data rows")
    t, F = zip(*rows)
    return tabulated(t, F, label=label if label is not None else str(path))


# ---------------------------------------------------------------------------
# sampling


def sample_line(m: RadialMeasure, rng) -> PolarLine:
    """Draw one line from ``m``: a uniform for the distance, then one for the angle.

    ``rng`` needs only a ``random()`` method returning floats in ``[0, 1)``,
    so a :class:`numpy.random.Generator` works.  A zero distance still gets a
    uniformly drawn direction.
    """
    u_dist = rng.random()
    u_angle = rng.random()
    return PolarLine(float(m.inv_cdf(u_dist)), TWO_PI * float(u_angle))


def sample_lines(m: RadialMeasure, size: int, rng: np.random.Generator):
    """Vectorized :func:`sample_line`; returns ``(dist, foot_angle)`` arrays."""
    u = rng.random((size, 2))
    return np.asarray(m.inv_cdf(u[:, 0]), dtype=float), TWO_PI * u[:, 1]


def chord_from_endpoints(phi1: float, phi2: float) -> PolarLine:
    """Line through the unit-circle points at angles ``phi1`` and ``phi2``."""
    if normalize_angle(phi1 - phi2) == 0.0:
        raise DegenerateChordError(f"chord endpoints coincide at angle {phi1}")
    c = math.cos(abs(0.5 * (phi1 - phi2)))
    mid = 0.5 * (phi1 + phi2)
    if c < 0.0:
        return PolarLine(-c, mid + math.pi)
    return PolarLine(c, mid)


def chords_from_endpoints(phi1, phi2):
    """Vectorized :func:`chord_from_endpoints`; returns ``(dist, foot_angle)``.

    Coincident endpoints are not rejected here; they give a zero-length chord
    with distance 1, which occurs with probability zero under continuous draws.
    """
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    c = np.cos(np.abs(0.5 * (phi1 - phi2)))
    mid = 0.5 * (phi1 + phi2)
    flip = c < 0.0
    return np.abs(c), normalize_angles(np.where(flip, mid + math.pi, mid))
