"""Law of the distance from the origin to the intersection of two random lines.

Closed forms exist for the uniform-radius, uniform-midpoint and Rayleigh line
models, and for uniform endpoints inside the unit disk.  Outside the disk the
uniform-endpoint law is defined by a one-dimensional integral, and an
arbitrary atomless foot-distance law ``F`` is pushed through

    P(l <= r) = (4/pi) int_0^r F(t) F'(t) arccos(t/r) dt.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np

from .errors import AtomError, DomainError, SingularityError
from .measures import ATOM_TOL, MeasureName, RadialMeasure, resolve_name
from .quadrature import DEFAULT_QUAD, QuadratureSpec, gauss_legendre, integrate
from .specfun import asin_sq, bessel_i0e, bessel_i0e_array, li2, li2_array

PI = math.pi
HALF_PI = 0.5 * math.pi
ENDPOINT_SCALE = 16.0 / PI**3

Model = Union[str, MeasureName, RadialMeasure]


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(np.isnan(r)) or np.any(r < 0):
        raise DomainError("radius must be >= 0")
    return r


def _out(value, like):
    return float(value) if np.ndim(like) == 0 else value


# ---------------------------------------------------------------------------
# uniform endpoints


def _one_minus_s_sin(s, u):
    # 1 - s sin(u) without cancellation near s = 1, u = pi/2
    return (1.0 - s) + s * 2.0 * np.sin(0.5 * (HALF_PI - u)) ** 2


def _arccos_s_sin(s, u):
    gap = np.maximum(_one_minus_s_sin(s, u), 0.0)
    return 2.0 * np.arcsin(np.minimum(np.sqrt(0.5 * gap), 1.0))


def endpoints_integral(r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Quadrature of ``(16/pi^3) int_0^min(1,r) arccos(t/r) arcsin(t) / sqrt(1-t^2) dt``.

    Substituting ``t = sin(u)`` removes the inverse square root at ``t = 1``.
    Valid for every ``r >= 0``; :func:`cdf_endpoints` uses it only for ``r > 1``.
    """
    r = float(_check_radius(r))
    if r == 0.0:
        return 0.0
    s = 1.0 / r
    upper = HALF_PI if r >= 1.0 else math.asin(r)
    return ENDPOINT_SCALE * integrate(lambda u: u * _arccos_s_sin(s, u), 0.0, upper, q)


def cdf_endpoints(r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``P(l <= r)`` for lines through two uniform points of the unit circle."""
    r = float(_check_radius(r))
    if r <= 1.0:
        return 2.0 / PI**2 * li2(r * r)
    return min(endpoints_integral(r, q), 1.0)


_GRADED_ORDER = 16


def _graded_nodes(levels: int):
    x, w = gauss_legendre(_GRADED_ORDER)
    # panels accumulate geometrically toward u = pi/2
    edges = HALF_PI * (1.0 - 0.5 ** np.arange(levels + 1))
    edges = np.append(edges, HALF_PI)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)[:, None]
    nodes = (0.5 * (hi + lo)[:, None] + half * x).ravel()
    weights = (half * w).ravel()
    return nodes, weights


def cdf_endpoints_array(r) -> np.ndarray:
    """Vectorized :func:`cdf_endpoints` for large batches (e.g. KS tests).

    Outside the unit disk each value is a fixed Gauss-Legendre sum on panels
    graded toward ``u = pi/2``; the grading depth follows the width
    ``sqrt(2 (1 - 1/r))`` of the near-singular feature there.
    """
    r = _check_radius(r)
    flat = r.ravel()
    out = np.empty_like(flat)
    inside = flat <= 1.0
    out[inside] = 2.0 / PI**2 * li2_array(flat[inside] ** 2)
    idx = np.flatnonzero(~inside)
    if idx.size:
        rr = flat[idx]
        s = np.where(np.isinf(rr), 0.0, 1.0 / rr)
        width = np.sqrt(2.0 * (1.0 - s))
        with np.errstate(divide="ignore"):
            levels = np.ceil(np.log2(PI / np.maximum(width, 1e-300))) + 1
        levels = np.clip(levels, 1, 60).astype(int)
        for lv in np.unique(levels):
            sel = idx[levels == lv]
            nodes, weights = _graded_nodes(int(lv))
            for start in range(0, sel.size, 20000):
                chunk = sel[start:start + 20000]
                sc = s[np.searchsorted(idx, chunk)][:, None]
                vals = nodes * _arccos_s_sin(sc, nodes)
                out[chunk] = np.minimum(ENDPOINT_SCALE * (vals @ weights), 1.0)
    return _out(out.reshape(r.shape), r)


def density_endpoints(r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Density of the uniform-endpoint intersection distance; infinite at ``r = 1``."""
    r = float(_check_radius(r))
    if r == 1.0:
        raise SingularityError("the uniform-endpoint density blows up at r = 1")
    if r == 0.0:
        return 0.0
    if r < 1.0:
        return -4.0 * math.log1p(-r * r) / (PI**2 * r)
    s = 1.0 / r

    def integrand(u):
        sin_u = np.sin(u)
        root = np.sqrt(_one_minus_s_sin(s, u) * (1.0 + s * sin_u))
        return u * sin_u / root

    return ENDPOINT_SCALE / (r * r) * integrate(integrand, 0.0, HALF_PI, q)


# ---------------------------------------------------------------------------
# uniform radius / uniform midpoint


def radius_inner_branch(r):
    r = np.asarray(r, dtype=float)
    return 0.5 * r * r


def _series_coefficients(terms: int):
    # arcsin(s)/s = sum c_k s^2k and sqrt(1 - s^2) = sum b_k s^2k
    c, b = [], []
    ratio = Fraction(1)
    for k in range(terms + 1):
        if k:
            ratio *= Fraction(2 * k - 1, 2 * k)
        c.append(ratio / (2 * k + 1))
        b.append(Fraction(1) if k == 0 else -ratio / (2 * k - 1))
    radius = [float(c[k] - b[k]) for k in range(terms + 1)]
    midpoint = [0.0] + [float(Fraction(3, 4) * (c[k] - b[k]) - Fraction(1, 2) * b[k - 1])
                        for k in range(1, terms + 1)]
    return radius, midpoint


_RADIUS_COEF, _MIDPOINT_COEF = _series_coefficients(14)
# below this 1/r the outer branches switch to their power series in 1/r
_SERIES_SWITCH = 0.1


def _even_series(s, coef):
    s2 = s * s
    total = np.zeros_like(s)
    for a in reversed(coef):
        total = total * s2 + a
    return total


def radius_outer_branch(r):
    """Uniform-radius CDF for ``r >= 1``.

    ``r^2 arcsin(1/r) - sqrt(r^2 - 1)`` cancels badly for large ``r``; it is
    rewritten as ``r * g(1/r)`` with ``g(s) = arcsin(s)/s - sqrt(1 - s^2)``,
    taken from its power series when ``s`` is small.
    """
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = 1.0 / r
        direct = np.arcsin(s) / s - np.sqrt((1.0 - s) * (1.0 + s))
        g = np.where(s < _SERIES_SWITCH, _even_series(s, _RADIUS_COEF), direct)
        return (2.0 * np.arccos(s) + r * g) / PI


def midpoint_inner_branch(r):
    r = np.asarray(r, dtype=float)
    return 0.375 * r**4


def midpoint_outer_branch(r):
    """Uniform-midpoint CDF for ``r >= 1``, with the same large-``r`` rewrite as
    :func:`radius_outer_branch` (here the bracket is ``r^3 h(1/r)``)."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = 1.0 / r
        direct = (0.75 * np.arcsin(s) / s
                  - 0.25 * (3.0 + 2.0 * s * s) * np.sqrt((1.0 - s) * (1.0 + s)))
        h = np.where(s < _SERIES_SWITCH, _even_series(s, _MIDPOINT_COEF), direct)
        return (2.0 * np.arccos(s) + r**3 * h) / PI


def _piecewise(r, inner, outer):
    r = _check_radius(r)
    rc = np.where(r <= 1.0, 1.0, r)
    val = np.where(r <= 1.0, inner(np.minimum(r, 1.0)), outer(rc))
    val = np.where(np.isinf(r), 1.0, val)
    return _out(np.clip(val, 0.0, 1.0), r)


def cdf_uniform_radius(r):
    """``P(l <= r)`` when each line's distance is uniform on ``[0, 1]``."""
    return _piecewise(r, radius_inner_branch, radius_outer_branch)


def cdf_uniform_midpoint(r):
    """``P(l <= r)`` when each chord midpoint is uniform on the unit disk."""
    return _piecewise(r, midpoint_inner_branch, midpoint_outer_branch)


# ---------------------------------------------------------------------------
# Rayleigh (Gaussian foot point)


def cdf_gaussian(r):
    """``1 - 2 e^{-r^2/4} I0(r^2/4) + e^{-r^2/2} I0(r^2/2)``.

    Both products are evaluated as the scaled function ``e^{-x} I0(x)``.
    Accepts scalars or arrays.
    """
    r = _check_radius(r)
    if r.ndim == 0:
        x = 0.25 * float(r) ** 2
        val = 1.0 - 2.0 * bessel_i0e(x) + bessel_i0e(2.0 * x)
    else:
        x = 0.25 * r * r
        val = 1.0 - 2.0 * bessel_i0e_array(x) + bessel_i0e_array(2.0 * x)
    return _out(np.clip(val, 0.0, 1.0), r)


def cdf_gaussian_quadrature(r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Direct quadrature of ``(4/pi) int_0^r (1 - e^{-t^2/2}) t e^{-t^2/2} arccos(t/r) dt``."""
    r = float(_check_radius(r))
    if r == 0.0:
        return 0.0

    def integrand(t):
        e = np.exp(-0.5 * t * t)
        return -np.expm1(-0.5 * t * t) * t * e * np.arccos(np.minimum(t / r, 1.0))

    return 4.0 / PI * integrate(integrand, 0.0, r, q)


# ---------------------------------------------------------------------------
# general transform


def _acos_antiderivatives(t, r):
    # A' = arccos(t/r), B' = t arccos(t/r)
    ratio = min(t / r, 1.0)
    root = math.sqrt(max(r * r - t * t, 0.0))
    acos = math.acos(ratio)
    A = t * acos - root
    B = 0.5 * t * t * acos + 0.25 * r * r * math.asin(ratio) - 0.25 * t * root
    return A, B


def _transform_tabulated(m: RadialMeasure, r: float) -> float:
    t, F = m.table
    total = 0.0
    for i in range(t.size - 1):
        lo, hi = t[i], min(t[i + 1], r)
        if lo >= r:
            break
        slope = (F[i + 1] - F[i]) / (t[i + 1] - t[i])
        if slope == 0.0:
            continue
        base = F[i] - slope * lo
        A_hi, B_hi = _acos_antiderivatives(hi, r)
        A_lo, B_lo = _acos_antiderivatives(lo, r)
        total += slope * (base * (A_hi - A_lo) + slope * (B_hi - B_lo))
    return 4.0 / PI * total


def transform_cdf(m: RadialMeasure, r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Intersection-distance CDF at ``r`` for two independent lines drawn from ``m``.

    Tabulated measures are integrated exactly cell by cell.  Other measures
    are integrated in probability space, ``(4/pi) int_0^F(r) v arccos(Q(v)/r) dv``
    with ``Q`` the inverse CDF, which sidesteps density singularities such as
    the one of the uniform-endpoint law at ``t = 1``.
    """
    r = float(_check_radius(r))
    if float(m.cdf(0.0)) > ATOM_TOL:
        raise AtomError(f"{m.display_name} has an atom at 0; the transform needs an atomless law")
    if r == 0.0:
        return 0.0
    if m.table is not None:
        return min(max(_transform_tabulated(m, r), 0.0), 1.0)
    upper = float(m.cdf(r))
    if upper == 0.0:
        return 0.0

    def integrand(v):
        ratio = np.minimum(np.asarray(m.inv_cdf(v), dtype=float) / r, 1.0)
        return v * np.arccos(ratio)

    return min(max(4.0 / PI * integrate(integrand, 0.0, upper, q), 0.0), 1.0)


# ---------------------------------------------------------------------------
# dispatch


def intersection_cdf(model: Model, r: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Scalar ``P(l <= r)`` for a built-in model name or any radial measure."""
    if isinstance(model, RadialMeasure) and model.name is MeasureName.CUSTOM:
        return transform_cdf(model, r, q)
    name = model.name if isinstance(model, RadialMeasure) else resolve_name(model)
    if name is MeasureName.UNIFORM_RADIUS:
        return cdf_uniform_radius(r)
    if name is MeasureName.UNIFORM_MIDPOINT:
        return cdf_uniform_midpoint(r)
    if name is MeasureName.UNIFORM_ENDPOINTS:
        return cdf_endpoints(r, q)
    if name is MeasureName.RAYLEIGH:
        return cdf_gaussian(r)
    raise DomainError(f"custom models need a RadialMeasure, got {model!r}")


def closed_form_cdf(model: Model) -> Callable:
    """Vectorized CDF for a built-in model, suitable for goodness-of-fit tests."""
    name = model.name if isinstance(model, RadialMeasure) else resolve_name(model)
    table = {
        MeasureName.UNIFORM_RADIUS: cdf_uniform_radius,
        MeasureName.UNIFORM_MIDPOINT: cdf_uniform_midpoint,
        MeasureName.UNIFORM_ENDPOINTS: cdf_endpoints_array,
        MeasureName.RAYLEIGH: cdf_gaussian,
    }
    if name not in table:
        raise DomainError(f"no closed form for {name.value}")
    return table[name]


def region_probability(model: Model, r_lo: float, r_hi: float, theta_lo: float,
                       theta_hi: float, q: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Probability that the intersection point lands in an annular sector.

    The polar angle of the point is uniform and independent of its distance,
    so the answer factorizes into an angular fraction times a radial mass.
    """
    if not 0.0 <= r_lo <= r_hi:
        raise DomainError(f"need 0 <= r_lo <= r_hi, got {r_lo}, {r_hi}")
    span = theta_hi - theta_lo
    if not 0.0 <= span <= 2.0 * PI:
        raise DomainError(f"need 0 <= theta_hi - theta_lo <= 2 pi, got {span}")
    if span == 0.0 or r_lo == r_hi:
        return 0.0
    hi = 1.0 if math.isinf(r_hi) else intersection_cdf(model, r_hi, q)
    lo = intersection_cdf(model, r_lo, q)
    return span / (2.0 * PI) * max(hi - lo, 0.0)


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    intermediate: float
    abs_err: float


def verify_dilog_identity(r: float, q: QuadratureSpec = DEFAULT_QUAD) -> IdentityCheck:
    """Evaluate the inside-disk uniform-endpoint CDF three independent ways.

    ``lhs`` is the quadrature of the defining integral, ``rhs`` is
    ``(2/pi^2) Li2(r^2)`` and ``intermediate`` is
    ``(8/pi^3) int_0^{pi/2} (arcsin(r sin u))^2 du`` with the square taken
    from its Taylor series.  ``abs_err`` is the largest pairwise gap.
    """
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"the dilogarithm identity holds for 0 <= r <= 1, got {r}")
    lhs = endpoints_integral(r, q)
    rhs = 2.0 / PI**2 * li2(r * r)
    vec_asin_sq = np.vectorize(asin_sq, otypes=[float])
    mid = 0.5 * ENDPOINT_SCALE * integrate(lambda u: vec_asin_sq(r * np.sin(u)), 0.0, HALF_PI, q)
    err = max(abs(lhs - rhs), abs(mid - rhs), abs(lhs - mid))
    return IdentityCheck(lhs, rhs, mid, err)


# ---------------------------------------------------------------------------
# sampled curves


class Provenance(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    QUADRATURE = "Quadrature"
    EMPIRICAL = "Empirical"


# quadrature noise can make consecutive CDF values dip by this much
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class CdfCurve:
    model_label: str
    grid: tuple
    provenance: Provenance

    def __post_init__(self):
        grid = tuple((float(r), float(v)) for r, v in self.grid)
        rs = np.array([g[0] for g in grid])
        vs = np.array([g[1] for g in grid])
        if np.any(rs < 0) or np.any(np.diff(rs) <= 0):
            raise DomainError("curve radii must be >= 0 and strictly increasing")
        if np.any(vs < 0) or np.any(vs > 1):
            raise DomainError("curve values must lie in [0, 1]")
        if np.any(np.diff(vs) < -_MONOTONE_SLACK):
            raise DomainError("curve values must be nondecreasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "provenance", Provenance(self.provenance))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["r", "value"])
        for r, v in self.grid:
            writer.writerow([format_number(r), format_number(v)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "model": self.model_label,
            "provenance": self.provenance.value,
            "points": [[r, v] for r, v in self.grid],
        })

    @classmethod
    def from_json(cls, text: str) -> "CdfCurve":
        data = json.loads(text)
        return cls(data["model"], tuple(map(tuple, data["points"])), Provenance(data["provenance"]))


def format_number(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(x), ".17g")


def cdf_curve(model: Model, radii: Sequence[float], q: QuadratureSpec = DEFAULT_QUAD) -> CdfCurve:
    """Tabulate the intersection-distance CDF of ``model`` on ``radii``."""
    if isinstance(model, RadialMeasure):
        label = model.display_name
        name = model.name
    else:
        name = resolve_name(model)
        label = name.value
    values = [intersection_cdf(model, r, q) for r in radii]
    if name is MeasureName.CUSTOM:
        prov = Provenance.QUADRATURE
    elif name is MeasureName.UNIFORM_ENDPOINTS and max(radii, default=0.0) > 1.0:
        prov = Provenance.QUADRATURE
    else:
        prov = Provenance.CLOSED_FORM
    return CdfCurve(label, tuple(zip(radii, values)), prov)
