"""Intersection points of the diagonals of a regular n-gon.

Vertex ``k`` sits at angle ``2 pi k / n`` on the unit circle.  The chord
through vertices ``i < j`` lies on the line ``x cos m + y sin m = d`` with
``m = pi (i + j) / n`` and signed offset ``d = cos(pi (j - i) / n)``, so two
chords with index sums ``s1, s2`` differ in direction by ``pi (s2 - s1) / n``.
Every table below is indexed by such integer differences, which keeps the
parallel test exact and the inner loops free of trigonometry.

For a quadruple ``a < b < c < d`` the pairing ``(a,c) x (b,d)`` is the one
crossing inside the circle; ``(a,b) x (c,d)`` and ``(a,d) x (b,c)`` meet
outside it (or are parallel) once the chords are extended to lines.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import njit, prange
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import AmbiguityError, DomainError
from .specfun import li2

# the bundled TBB is often too old for numba and only produces a warning
if "NUMBA_THREADING_LAYER_PRIORITY" not in os.environ:
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

DISTINCT_MAX_N = 120
SNAP_TOL = 1e-9


def set_threads(threads: int) -> None:
    numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True)
def _tables(n):
    k = np.arange(2 * n)
    cosines = np.cos(np.pi * k / n)
    sin_sq = np.sin(np.pi * k / n) ** 2
    if n % 2 == 0:
        # diameters pass exactly through the center
        cosines[n // 2] = 0.0
        cosines[3 * n // 2] = 0.0
    return cosines, sin_sq


@njit(cache=True, inline="always")
def _bin(num, den, r2edges):
    # first edge with num / den <= edge, compared without dividing
    j = 0
    nb = r2edges.shape[0]
    while j < nb and num > r2edges[j] * den:
        j += 1
    return j


@njit(cache=True, parallel=True)
def _crossing_kernel(n, r2edges):
    nb = r2edges.shape[0]
    cosines, sin_sq = _tables(n)
    out = np.zeros((n, nb + 1), dtype=np.int64)
    for a in prange(n):
        row = np.zeros(nb + 1, dtype=np.int64)
        for c in range(a + 2, n):
            d1 = cosines[c - a]
            d1s = d1 * d1
            for b in range(a + 1, c):
                base = b - a - c
                for d in range(c + 1, n):
                    d2 = cosines[d - b]
                    idx = base + d
                    num = d1s + d2 * d2 - 2.0 * d1 * d2 * cosines[idx]
                    row[_bin(num, sin_sq[idx], r2edges)] += 1
        out[a] = row
    return out


@njit(cache=True, parallel=True)
def _lines_kernel(n, r2edges):
    nb = r2edges.shape[0]
    cosines, sin_sq = _tables(n)
    out = np.zeros((n, nb + 1), dtype=np.int64)
    par = np.zeros(n, dtype=np.int64)
    for a in prange(n):
        row = np.zeros(nb + 1, dtype=np.int64)
        skipped = 0
        for b in range(a + 1, n):
            dab = cosines[b - a]
            for c in range(b + 1, n):
                dac = cosines[c - a]
                for d in range(c + 1, n):
                    # (a,c) x (b,d): always crosses
                    d2 = cosines[d - b]
                    idx = b + d - a - c
                    num = dac * dac + d2 * d2 - 2.0 * dac * d2 * cosines[idx]
                    row[_bin(num, sin_sq[idx], r2edges)] += 1
                    # (a,b) x (c,d)
                    idx = c + d - a - b
                    if idx == n:
                        skipped += 1
                    else:
                        d2 = cosines[d - c]
                        num = dab * dab + d2 * d2 - 2.0 * dab * d2 * cosines[idx]
                        row[_bin(num, sin_sq[idx], r2edges)] += 1
                    # (a,d) x (b,c)
                    idx = abs(b + c - a - d)
                    if idx == 0:
                        skipped += 1
                    else:
                        d1 = cosines[d - a]
                        d2 = cosines[c - b]
                        num = d1 * d1 + d2 * d2 - 2.0 * d1 * d2 * cosines[idx]
                        row[_bin(num, sin_sq[idx], r2edges)] += 1
        out[a] = row
        par[a] = skipped
    return out, par


@njit(cache=True)
def _crossing_points(n):
    total = n * (n - 1) * (n - 2) * (n - 3) // 24
    xs = np.empty(total)
    ys = np.empty(total)
    k = 0
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                m1 = np.pi * (a + c) / n
                d1 = np.cos(np.pi * (c - a) / n)
                for d in range(c + 1, n):
                    m2 = np.pi * (b + d) / n
                    d2 = np.cos(np.pi * (d - b) / n)
                    s = np.sin(m2 - m1)
                    xs[k] = (d1 * np.sin(m2) - d2 * np.sin(m1)) / s
                    ys[k] = (d2 * np.cos(m1) - d1 * np.cos(m2)) / s
                    k += 1
    return xs, ys


def _check_n(n: int, lo: int = 4) -> int:
    if int(n) != n or n < lo:
        raise DomainError(f"n must be an integer >= {lo}, got {n}")
    return int(n)


def _check_radii(radii, upper=None) -> np.ndarray:
    r = np.atleast_1d(np.asarray(radii, dtype=float))
    if r.size == 0:
        raise DomainError("at least one radius is required")
    if np.any(~np.isfinite(r)) or np.any(r < 0):
        raise DomainError("radii must be finite and >= 0")
    if upper is not None and np.any(r > upper):
        raise DomainError(f"radii must not exceed {upper}")
    if np.any(np.diff(r) < 0):
        raise DomainError("radii must be ascending")
    return r


@dataclass
class NgonReport:
    n: int
    radii: np.ndarray
    counts_with_multiplicity: np.ndarray | None = None
    total_pairs: int = 0
    lines_counts: np.ndarray | None = None
    parallel_pairs: int | None = None
    nonparallel_total: int | None = None
    distinct_interior: int | None = None
    pr_formula_value: int | None = field(default=None)

    def to_json(self) -> str:
        def ints(a):
            return None if a is None else [int(v) for v in a]

        return json.dumps({
            "n": self.n,
            "radii": [float(r) for r in self.radii],
            "with_multiplicity": ints(self.counts_with_multiplicity),
            "lines": ints(self.lines_counts),
            "parallel_pairs": self.parallel_pairs,
            "distinct_interior": self.distinct_interior,
            "pr_formula_value": self.pr_formula_value,
        })


def count_with_multiplicity(n: int, radii, threads: int | None = None) -> NgonReport:
    """Count crossing pairs of diagonals meeting within each radius.

    A point where ``k`` diagonals meet contributes ``C(k, 2)``.  ``radii``
    must be ascending and within ``[0, 1]``.
    """
    n = _check_n(n)
    r = _check_radii(radii, upper=1.0)
    if threads is not None:
        set_threads(threads)
    hist = _crossing_kernel(n, r * r).sum(axis=0)
    counts = np.cumsum(hist)[:-1]
    return NgonReport(n, r, counts_with_multiplicity=counts, total_pairs=math.comb(n, 4))


def lines_histogram(n: int, radii, threads: int | None = None) -> NgonReport:
    """Extend every diagonal to a line and count all three pairings per quadruple.

    Parallel pairings are detected by the integer index test and tallied in
    ``parallel_pairs``; ``lines_counts[i]`` counts the rest meeting within
    ``radii[i]``.
    """
    n = _check_n(n)
    r = _check_radii(radii)
    if threads is not None:
        set_threads(threads)
    hist, par = _lines_kernel(n, r * r)
    hist = hist.sum(axis=0)
    parallel = int(par.sum())
    nonparallel = int(hist.sum())
    assert nonparallel + parallel == 3 * math.comb(n, 4)
    return NgonReport(n, r, total_pairs=math.comb(n, 4), lines_counts=np.cumsum(hist)[:-1],
                      parallel_pairs=parallel, nonparallel_total=nonparallel)


def lines_parallel(n: int, i: int, j: int, k: int, l: int) -> bool:
    """Whether the lines through chords ``{i,j}`` and ``{k,l}`` are parallel."""
    return (i + j - k - l) % n == 0


_PR_TERMS = (
    # (divisor, coefficient as a function of n, denominator)
    (4, lambda n: 3 * n, 2),
    (6, lambda n: 45 * n * n - 262 * n, 6),
    (12, lambda n: -42 * n, 1),
    (18, lambda n: -60 * n, 1),
    (24, lambda n: -35 * n, 1),
    (30, lambda n: 38 * n, 1),
    (42, lambda n: 82 * n, 1),
    (60, lambda n: 330 * n, 1),
    (84, lambda n: 144 * n, 1),
    (90, lambda n: 96 * n, 1),
    (120, lambda n: 144 * n, 1),
    (210, lambda n: 96 * n, 1),
)


def _exact_div(num: int, den: int) -> int:
    q, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"{num}/{den} is not an integer")
    return q


def poonen_rubinstein(n: int) -> int:
    """Number of distinct interior intersection points of the diagonals."""
    n = _check_n(n, lo=3)
    value = math.comb(n, 4)
    if n % 2 == 0:
        value += _exact_div(-5 * n**3 + 45 * n**2 - 70 * n + 24, 24)
    for k, coef, den in _PR_TERMS:
        if n % k == 0:
            value -= _exact_div(coef(n), den)
    return value


def distinct_count(n: int, snap_tol: float = SNAP_TOL) -> int:
    """Count distinct crossing points by snapping to a grid of pitch ``snap_tol``.

    Cells that land within ``snap_tol`` of each other are merged.  If two
    points sit between ``snap_tol`` and ``10 * snap_tol`` apart, the
    tolerance cannot decide whether they coincide and AmbiguityError is
    raised.
    """
    n = _check_n(n)
    if n > DISTINCT_MAX_N:
        raise DomainError(f"distinct_count supports n <= {DISTINCT_MAX_N}, got {n}")
    if not snap_tol > 0:
        raise DomainError(f"snap_tol must be positive, got {snap_tol}")
    xs, ys = _crossing_points(n)
    keys = np.round(np.column_stack((xs, ys)) / snap_tol).astype(np.int64)
    cells = np.unique(keys, axis=0)
    pts = cells * snap_tol
    pairs = cKDTree(pts).query_pairs(10.0 * snap_tol, output_type="ndarray")
    if len(pairs) == 0:
        return len(cells)
    gaps = np.hypot(*(pts[pairs[:, 0]] - pts[pairs[:, 1]]).T)
    unsure = (gaps >= snap_tol) & (gaps < 10.0 * snap_tol)
    if np.any(unsure):
        raise AmbiguityError(
            f"n={n}: {int(unsure.sum())} point pairs lie between {snap_tol:g} and "
            f"{10 * snap_tol:g} apart; snapping cannot resolve them"
        )
    # merge neighbouring cells that split one true point
    close = pairs[gaps < snap_tol]
    graph = coo_matrix((np.ones(len(close)), (close[:, 0], close[:, 1])),
                       shape=(len(cells), len(cells)))
    ncomp, _ = connected_components(graph, directed=False)
    return int(ncomp)


def karamata_ratio(n: int, r: float, threads: int | None = None) -> float:
    """Share of crossing pairs meeting within distance ``r`` of the center."""
    rep = count_with_multiplicity(n, [r], threads)
    return float(rep.counts_with_multiplicity[0]) / rep.total_pairs


def karamata_limit(r: float) -> float:
    """Large-n limit of :func:`karamata_ratio`: ``(6/pi^2) Li2(r^2)``."""
    return 6.0 / math.pi**2 * li2(r * r)
