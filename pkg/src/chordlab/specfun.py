"""Special functions behind the closed-form distance laws.

Everything here is a pure function of its arguments.  Scalar routines take a
:class:`SeriesConfig` and raise :class:`~chordlab.errors.ConvergenceError`
instead of silently returning a truncated sum; the ``*_array`` variants are
fixed-length vectorized versions used on Monte Carlo sized inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

PI2_6 = math.pi**2 / 6.0


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation policy for the power series in this module.

    ``tolerance`` bounds the absolute truncation error, ``max_terms`` caps the
    number of terms summed before giving up.
    """

    tolerance: float = 1e-14
    max_terms: int = 1_000_000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms}")


DEFAULT_SERIES = SeriesConfig()


# ---------------------------------------------------------------------------
# dilogarithm


def _li2_series(x: float, cfg: SeriesConfig) -> float:
    total = 0.0
    power = 1.0
    for k in range(1, cfg.max_terms + 1):
        power *= x
        total += power / (k * k)
        if x < 1.0:
            bound = power * x / ((k + 1) ** 2 * (1.0 - x))
        else:
            bound = 1.0 / k
        if bound <= cfg.tolerance:
            return total
    raise ConvergenceError(
        f"Li2 series at x={x} did not reach tolerance {cfg.tolerance} in {cfg.max_terms} terms"
    )


def li2(x: float, cfg: SeriesConfig = DEFAULT_SERIES, reflect: bool = True) -> float:
    """Dilogarithm ``sum_{k>=1} x**k / k**2`` for ``0 <= x <= 1``.

    For ``x > 1/2`` the reflection
    ``Li2(x) + Li2(1-x) = pi^2/6 - log(x) log(1-x)`` moves the series onto
    ``[0, 1/2]`` where it converges geometrically.  Passing ``reflect=False``
    sums the raw series, which near ``x = 1`` will usually exhaust
    ``cfg.max_terms``.
    """
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"li2 is defined here on [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if not reflect or x <= 0.5:
        return _li2_series(x, cfg)
    y = 1.0 - x
    if y == 0.0:
        return PI2_6
    return PI2_6 - math.log(x) * math.log1p(-x) - _li2_series(y, cfg)


def li2_array(x) -> np.ndarray:
    """Vectorized :func:`li2` on ``[0, 1]`` to double precision."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
        raise DomainError("li2_array arguments must lie in [0, 1]")
    hi = x > 0.5
    y = np.where(hi, 1.0 - x, x)
    # y <= 1/2, so 60 terms leave a tail below 2**-60 / 3600
    total = np.zeros_like(y)
    power = np.ones_like(y)
    for k in range(1, 61):
        power = power * y
        total += power / (k * k)
    with np.errstate(divide="ignore", invalid="ignore"):
        refl = PI2_6 - np.log(x) * np.log1p(-x) - total
    refl = np.where(x == 1.0, PI2_6, refl)
    return np.where(hi, refl, total)


# ---------------------------------------------------------------------------
# modified Bessel I0


def bessel_i0(x: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Modified Bessel function ``I0(x) = sum (x^2/4)^k / (k!)^2`` for ``x >= 0``."""
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"bessel_i0 expects x >= 0, got {x}")
    return _i0_series(x, 1.0, cfg)


def _i0_series(x: float, first: float, cfg: SeriesConfig) -> float:
    q = 0.25 * x * x
    term = first
    total = first
    for k in range(1, cfg.max_terms + 1):
        term *= q / (k * k)
        total += term
        ratio = q / ((k + 1) * (k + 1))
        if ratio < 1.0 and term * ratio / (1.0 - ratio) <= cfg.tolerance:
            return total
    raise ConvergenceError(f"I0 series at x={x} did not converge in {cfg.max_terms} terms")


# beyond this the scaled series would need O(x) terms; the asymptotic form is
# already accurate to ~1e-22 here
_I0E_SERIES_MAX = 50.0


def _i0e_asymptotic(x):
    total = np.ones_like(x)
    term = np.ones_like(x)
    for k in range(1, 31):
        term = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        total = total + term
    return total / np.sqrt(2.0 * math.pi * x)


def bessel_i0e(x: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """Exponentially scaled ``exp(-x) I0(x)`` for ``x >= 0``.

    The exponent is folded into the first series term so nothing overflows;
    above ``x = 50`` the large-argument asymptotic expansion takes over.
    """
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"bessel_i0e expects x >= 0, got {x}")
    if math.isinf(x):
        return 0.0
    if x <= _I0E_SERIES_MAX:
        return _i0_series(x, math.exp(-x), cfg)
    return float(_i0e_asymptotic(np.float64(x)))


def bessel_i0e_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(np.isnan(x)):
        raise DomainError("bessel_i0e_array arguments must be >= 0")
    out = np.empty_like(x)
    small = x <= _I0E_SERIES_MAX
    xs = x[small]
    q = 0.25 * xs * xs
    term = np.exp(-xs)
    total = term.copy()
    # (q/k^2) < 1e-17 * peak well before k = 200 for x <= 50
    for k in range(1, 200):
        term = term * q / (k * k)
        total += term
    out[small] = total
    big = ~small
    with np.errstate(divide="ignore", invalid="ignore"):
        out[big] = np.where(np.isinf(x[big]), 0.0, _i0e_asymptotic(x[big]))
    return out


# ---------------------------------------------------------------------------
# (arcsin x)^2 and Wallis integrals


def _asin_sq_series(x: float, cfg: SeriesConfig) -> float:
    x2 = x * x
    g = 1.0  # (2x)^(2n) / C(2n, n)
    total = 0.0
    for n in range(1, cfg.max_terms + 1):
        g *= 2.0 * x2 * n / (2 * n - 1)
        term = g / (n * n)
        total += term
        if x2 < 1.0 and term * x2 / (1.0 - x2) <= 2.0 * cfg.tolerance:
            return 0.5 * total
        if term == 0.0:
            return 0.5 * total
    raise ConvergenceError(f"(arcsin x)^2 series at x={x} did not converge")


def asin_sq(x: float, cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """``(arcsin x)^2`` from its Taylor series ``1/2 sum (2x)^(2n) / (n^2 C(2n,n))``.

    Arguments with ``|x| > 1/sqrt(2)`` are first halved in angle,
    ``arcsin x = 2 arcsin(x / sqrt(2 (1 + sqrt(1 - x^2))))``, which keeps the
    series ratio at most 1/2.
    """
    x = float(x)
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"asin_sq is defined on [-1, 1], got {x}")
    if x * x > 0.5:
        c = math.sqrt((1.0 - abs(x)) * (1.0 + abs(x)))
        y = x / math.sqrt(2.0 * (1.0 + c))
        return 4.0 * _asin_sq_series(y, SeriesConfig(cfg.tolerance / 4.0, cfg.max_terms))
    return _asin_sq_series(x, cfg)


def central_binomial_ratio(n: int) -> float:
    """``C(2n, n) / 4**n`` built multiplicatively so large ``n`` cannot overflow."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    ratio = 1.0
    for k in range(1, n + 1):
        ratio *= (2 * k - 1) / (2 * k)
    return ratio


def wallis_even(n: int) -> float:
    """``int_0^1 x^(2n) / sqrt(1 - x^2) dx = (pi/2) C(2n, n) / 4^n``."""
    if int(n) != n:
        raise DomainError(f"n must be an integer, got {n}")
    return 0.5 * math.pi * central_binomial_ratio(int(n))
