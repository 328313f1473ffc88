"""Distance from the center of the unit circle to the crossing point of two
random chords or lines, in closed form, by quadrature, by simulation, and on
the diagonals of regular polygons."""

from .distribution import (
    CdfCurve,
    cdf_endpoints,
    cdf_gaussian,
    cdf_uniform_midpoint,
    cdf_uniform_radius,
    density_endpoints,
    intersection_cdf,
    region_probability,
    transform_cdf,
    verify_dilog_identity,
)
from .geometry import PlanarPoint, distance_only, intersect
from .measures import PolarLine, RadialMeasure, builtin, chord_from_endpoints, tabulated
from .montecarlo import EmpiricalSample, ks_statistic, run_mc, tail_probe
from .ngon import (
    NgonReport,
    count_with_multiplicity,
    distinct_count,
    karamata_ratio,
    lines_histogram,
    poonen_rubinstein,
)
from .specfun import asin_sq, bessel_i0, li2

__version__ = "0.1.0"
