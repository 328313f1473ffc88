"""Monte Carlo sampling of intersection distances.

Stream assignment (part of the public contract): trials are cut into
consecutive blocks of ``BLOCK_SIZE``.  Block ``k`` of stream ``s`` under seed
``seed`` draws from ``PCG64(SeedSequence(seed, spawn_key=(s, k)))``.  Workers
pick up whole blocks, and blocks are concatenated in index order before
sorting, so a run is bit-identical for any thread count.
"""

from __future__ import annotations

import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distribution import format_number
from .geometry import PARALLEL_TOL, distances
from .measures import (
    TWO_PI,
    MeasureName,
    RadialMeasure,
    builtin,
    chords_from_endpoints,
    resolve_name,
)

BLOCK_SIZE = 1 << 16


def _measure(model) -> RadialMeasure:
    if isinstance(model, RadialMeasure):
        return model
    return builtin(resolve_name(model))


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def draw_line_pairs(model, count: int, rng: np.random.Generator):
    """Draw ``count`` independent line pairs as ``(d1, t1, d2, t2)`` arrays.

    Uniform-endpoint lines are built from four uniform circle angles per
    trial; every other model uses inverse-CDF distances with uniform angles.
    """
    m = _measure(model)
    if m.name is MeasureName.UNIFORM_ENDPOINTS:
        phi = TWO_PI * rng.random((count, 4))
        d1, t1 = chords_from_endpoints(phi[:, 0], phi[:, 1])
        d2, t2 = chords_from_endpoints(phi[:, 2], phi[:, 3])
        return d1, t1, d2, t2
    u = rng.random((count, 4))
    d1 = np.asarray(m.inv_cdf(u[:, 0]), dtype=float)
    d2 = np.asarray(m.inv_cdf(u[:, 2]), dtype=float)
    return d1, TWO_PI * u[:, 1], d2, TWO_PI * u[:, 3]


def _run_block(model, seed, stream, block, count):
    rng = block_generator(seed, stream, block)
    r, parallel = distances(*draw_line_pairs(model, count, rng), parallel_tol=PARALLEL_TOL)
    return r[~parallel], int(parallel.sum())


def _blocks(n: int):
    return [(k, min(BLOCK_SIZE, n - k * BLOCK_SIZE)) for k in range(math.ceil(n / BLOCK_SIZE))]


def _map_blocks(fn, blocks, threads: int):
    if threads <= 1 or len(blocks) <= 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, blocks))


@dataclass(frozen=True)
class EmpiricalSample:
    model_label: str
    seed: int
    count: int
    distances: np.ndarray
    parallel_skips: int
    stream: int = 0

    def __post_init__(self):
        if self.count != len(self.distances):
            raise ValueError("count must equal the number of stored distances")

    def ecdf(self, r) -> np.ndarray:
        """Empirical ``P(l <= r)``."""
        return np.searchsorted(self.distances, r, side="right") / self.count

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("distance\n")
        for d in self.distances:
            buf.write(format_number(d))
            buf.write("\n")
        return buf.getvalue()


def _label(model) -> str:
    m = _measure(model)
    return m.display_name


def run_mc(model, n: int, seed: int, threads: int = 1, stream: int = 0) -> EmpiricalSample:
    """Sample ``n`` line pairs and keep the sorted intersection distances.

    Numerically parallel pairs (``|sin dtheta| < 1e-12``) are dropped and
    counted in ``parallel_skips`` rather than redrawn.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    results = _map_blocks(lambda b: _run_block(model, seed, stream, b[0], b[1]), _blocks(n), threads)
    r = np.concatenate([res[0] for res in results])
    r.sort(kind="stable")
    skips = sum(res[1] for res in results)
    return EmpiricalSample(_label(model), int(seed), int(r.size), r, skips, stream)


def ks_statistic(s: EmpiricalSample, cdf: Callable) -> float:
    """Two-sided Kolmogorov-Smirnov distance between ``s`` and ``cdf``.

    ``cdf`` is called once on the full sorted sample array.
    """
    n = s.count
    if n == 0:
        raise ValueError("empty sample")
    F = np.asarray(cdf(s.distances), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def tail_probe(s: EmpiricalSample, r_values):
    """Rows ``(r, P(l > r), r * P(l > r))`` from the empirical sample."""
    rows = []
    for r in r_values:
        p = 1.0 - float(s.ecdf(r))
        rows.append((float(r), p, float(r) * p))
    return rows


# ---------------------------------------------------------------------------
# streaming histogram mode

HIST_BINS = 10_000
HIST_LO = 1e-6
HIST_HI = 1e10


@dataclass
class EmpiricalHistogram:
    """Counts on log-spaced bins; the first and last bins are open-ended."""

    model_label: str
    seed: int
    count: int
    edges: np.ndarray
    counts: np.ndarray
    parallel_skips: int

    def to_json(self) -> str:
        bins = [[float(lo), float(hi), int(c)]
                for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts)]
        return json.dumps({"model": self.model_label, "seed": self.seed,
                           "count": self.count, "bins": bins})

    def ecdf_at_edges(self) -> np.ndarray:
        return np.cumsum(self.counts) / self.count


def histogram_edges(bins: int = HIST_BINS) -> np.ndarray:
    inner = np.logspace(math.log10(HIST_LO), math.log10(HIST_HI), bins - 1)
    return np.concatenate(([0.0], inner, [math.inf]))


def run_mc_histogram(model, n: int, seed: int, threads: int = 1, stream: int = 0,
                     bins: int = HIST_BINS) -> EmpiricalHistogram:
    """Like :func:`run_mc` but only accumulates a histogram, in O(bins) memory.

    Uses the same block streams, so a histogram of :func:`run_mc` output with
    the same arguments gives identical counts.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    edges = histogram_edges(bins)

    def one(block):
        r, skips = _run_block(model, seed, stream, block[0], block[1])
        idx = np.searchsorted(edges, r, side="right") - 1
        return np.bincount(np.clip(idx, 0, bins - 1), minlength=bins), skips

    counts = np.zeros(bins, dtype=np.int64)
    skips = 0
    # accumulate in fixed-size waves to bound memory for very large n
    blocks = _blocks(n)
    wave = max(threads, 1) * 8
    for start in range(0, len(blocks), wave):
        for c, sk in _map_blocks(one, blocks[start:start + wave], threads):
            counts += c
            skips += sk
    return EmpiricalHistogram(_label(model), int(seed), int(counts.sum()), edges, counts, skips)
