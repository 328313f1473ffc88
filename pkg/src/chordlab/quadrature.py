"""Adaptive one-dimensional quadrature.

Two rules are available: globally adaptive Gauss-Legendre bisection and
tanh-sinh (double exponential).  Integrands are called with numpy arrays of
nodes and must return arrays of the same shape.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import QuadratureError


class Rule(str, enum.Enum):
    GAUSS_LEGENDRE_ADAPTIVE = "GaussLegendreAdaptive"
    TANH_SINH = "TanhSinh"


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-12
    max_depth: int = 40
    rule: Rule = Rule.GAUSS_LEGENDRE_ADAPTIVE

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ValueError(f"max_depth must be a positive integer, got {self.max_depth}")
        object.__setattr__(self, "rule", Rule(self.rule))


DEFAULT_QUAD = QuadratureSpec()

_GL_ORDER = 15


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    """Nodes and weights on ``[-1, 1]``."""
    return np.polynomial.legendre.leggauss(order)


def _gl_panel(f, a, b, x, w):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * float(np.dot(w, f(mid + half * x)))


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute error ``spec.abs_tol``."""
    if b == a:
        return 0.0
    if b < a:
        return -integrate(f, b, a, spec)
    if spec.rule is Rule.TANH_SINH:
        return _tanh_sinh(f, a, b, spec)
    return _adaptive_gl(f, a, b, spec)


def _adaptive_gl(f, a, b, spec):
    x, w = gauss_legendre(_GL_ORDER)
    width = b - a

    def refine(lo, hi, coarse, depth):
        m = 0.5 * (lo + hi)
        left = _gl_panel(f, lo, m, x, w)
        right = _gl_panel(f, m, hi, x, w)
        err = abs(left + right - coarse)
        # panels below rounding resolution cannot improve further
        if hi - lo <= 1e-15 * width:
            err = 0.0
        return (-err, lo, hi, left, right, depth)

    # max-heap on the error estimate of each panel's two-half refinement
    heap = [refine(a, b, _gl_panel(f, a, b, x, w), 1)]
    total_err = -heap[0][0]
    while total_err > spec.abs_tol:
        neg_err, lo, hi, left, right, depth = heapq.heappop(heap)
        if depth >= spec.max_depth:
            raise QuadratureError(
                f"adaptive Gauss-Legendre on [{a}, {b}] reached depth {depth} "
                f"with error estimate {total_err:.3e} > {spec.abs_tol:.1e}"
            )
        total_err += neg_err
        m = 0.5 * (lo + hi)
        for item in (refine(lo, m, left, depth + 1), refine(m, hi, right, depth + 1)):
            heapq.heappush(heap, item)
            total_err -= item[0]
        if len(heap) > 100_000:
            raise QuadratureError(f"adaptive Gauss-Legendre on [{a}, {b}] exceeded its panel budget")
    return math.fsum(item[3] + item[4] for item in heap)


def _tanh_sinh(f, a, b, spec):
    half = 0.5 * (b - a)
    t_max = 4.0
    h = 0.5
    prev = None
    for _level in range(min(spec.max_depth, 16)):
        n = int(round(t_max / h))
        t = h * np.arange(-n, n + 1)
        u = 0.5 * math.pi * np.sinh(t)
        # distance of each node from the nearer endpoint, computed without cancellation
        gap = half * 2.0 / (np.exp(2.0 * np.abs(u)) + 1.0)
        nodes = np.where(t < 0, a + gap, b - gap)
        # nodes that round onto an endpoint carry no usable information
        keep = (nodes > a) & (nodes < b)
        t, u, nodes = t[keep], u[keep], nodes[keep]
        weights = half * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        value = h * float(np.dot(weights, f(nodes)))
        if prev is not None and abs(value - prev) <= spec.abs_tol:
            return value
        prev = value
        h *= 0.5
    raise QuadratureError(f"tanh-sinh on [{a}, {b}] did not converge in {spec.max_depth} levels")
