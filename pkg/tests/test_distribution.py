import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from chordlab.distribution import (
    ENDPOINT_SCALE,
    CdfCurve,
    Provenance,
    cdf_curve,
    cdf_endpoints,
    cdf_endpoints_array,
    cdf_gaussian,
    cdf_gaussian_quadrature,
    cdf_uniform_midpoint,
    cdf_uniform_radius,
    closed_form_cdf,
    density_endpoints,
    format_number,
    intersection_cdf,
    midpoint_inner_branch,
    midpoint_outer_branch,
    radius_inner_branch,
    radius_outer_branch,
    region_probability,
    transform_cdf,
    verify_dilog_identity,
)
from chordlab.errors import AtomError, DomainError, SingularityError
from chordlab.geometry import distances
from chordlab.measures import builtin, tabulated

MODELS = ["radius", "midpoint", "endpoints", "gaussian"]

mp.mp.dps = 40


def mp_endpoint_cdf(r):
    """Uniform-endpoint CDF straight from the defining arccos integral, in mpmath."""
    r = mp.mpf(r)
    top = min(r, 1)
    f = lambda t: (2 / mp.pi) * mp.asin(t) * 2 / (mp.pi * mp.sqrt(1 - t * t)) * mp.acos(t / r)
    return float(4 / mp.pi * mp.quad(f, [0, top]))


def mp_closed_radius(r):
    r = mp.mpf(r)
    if r <= 1:
        return float(r**2 / 2)
    return float((2 * mp.acos(1 / r) + r**2 * mp.asin(1 / r) - mp.sqrt(r**2 - 1)) / mp.pi)


def mp_closed_midpoint(r):
    r = mp.mpf(r)
    if r <= 1:
        return float(3 * r**4 / 8)
    return float((2 * mp.acos(1 / r) + mp.mpf(3) / 4 * r**4 * mp.asin(1 / r)
                  - (3 * r**2 + 2) * mp.sqrt(r**2 - 1) / 4) / mp.pi)


def mp_gaussian(r):
    r = mp.mpf(r)
    f = lambda t: (1 - mp.exp(-t * t / 2)) * t * mp.exp(-t * t / 2) * mp.acos(t / r)
    return float(4 / mp.pi * mp.quad(f, mp.linspace(0, r, 8)))


# --- uniform endpoints ------------------------------------------------------

def test_endpoints_special_values():
    assert cdf_endpoints(0.0) == 0.0
    assert cdf_endpoints(1.0) == pytest.approx(1 / 3, abs=1e-14)
    assert cdf_endpoints(1 / math.sqrt(2)) == pytest.approx(1 / 6 - (math.log(2) / math.pi) ** 2, abs=1e-14)


@pytest.mark.parametrize("r", [0.1, 0.5, 0.9, 0.999, 1.0, 1.001, 1.5, 3.0, 10.0, 250.0])
def test_endpoints_against_mpmath_integral(r):
    assert cdf_endpoints(r) == pytest.approx(mp_endpoint_cdf(r), abs=1e-11)


def test_endpoints_array_agrees_with_scalar():
    r = np.concatenate([np.linspace(0, 3, 61), [7.0, 40.0, 1e3, 1e6]])
    assert np.max(np.abs(cdf_endpoints_array(r) - [cdf_endpoints(x) for x in r])) < 1e-12


def test_endpoints_negative_radius_rejected():
    with pytest.raises(DomainError):
        cdf_endpoints(-0.1)


def test_density_values():
    assert density_endpoints(0.0) == 0.0
    assert density_endpoints(0.5) == pytest.approx(-4 * math.log(0.75) / (math.pi**2 * 0.5), rel=1e-15)
    with pytest.raises(SingularityError):
        density_endpoints(1.0)


@pytest.mark.parametrize("r", [0.3, 0.8, 1.5, 3.0])
def test_density_is_derivative_of_cdf(r):
    h = 1e-5
    fd = (cdf_endpoints(r + h) - cdf_endpoints(r - h)) / (2 * h)
    assert density_endpoints(r) == pytest.approx(fd, abs=1e-6)


def test_density_integrates_to_cdf_beyond_one():
    val, _ = sp_integrate.quad(density_endpoints, 1.5, 4.0, epsabs=1e-12)
    assert val == pytest.approx(cdf_endpoints(4.0) - cdf_endpoints(1.5), abs=1e-10)


def test_tail_constant():
    r = 1e3
    assert r * (1 - cdf_endpoints(r)) == pytest.approx(ENDPOINT_SCALE, rel=1e-3)
    # the constant itself as the integral of t arcsin(t) / sqrt(1 - t^2)
    val = float(mp.quad(lambda t: t * mp.asin(t) / mp.sqrt(1 - t * t), [0, 1]))
    assert 16 / math.pi**3 * val == pytest.approx(ENDPOINT_SCALE, rel=1e-14)


@pytest.mark.parametrize("r", [0.0, 0.3, 0.6, 1.0])
def test_dilog_identity(r):
    chk = verify_dilog_identity(r)
    assert chk.abs_err <= 1e-10
    assert abs(chk.intermediate - chk.rhs) <= 1e-10
    if r == 0.0:
        assert chk.lhs == 0.0 and chk.rhs == 0.0
    if r == 1.0:
        assert chk.lhs == pytest.approx(1 / 3, abs=1e-10)


# --- uniform radius / midpoint -----------------------------------------------

@pytest.mark.parametrize("r", [0.2, 0.7, 1.0, 1.2, 2.0, 9.99, 10.01, 100.0, 1e4, 1e8])
def test_radius_and_midpoint_against_mpmath(r):
    assert cdf_uniform_radius(r) == pytest.approx(mp_closed_radius(r), abs=1e-14)
    assert cdf_uniform_midpoint(r) == pytest.approx(mp_closed_midpoint(r), abs=1e-13)


def test_branches_meet_at_one():
    assert float(radius_inner_branch(1.0)) == pytest.approx(0.5, abs=1e-15)
    assert float(radius_outer_branch(1.0)) == pytest.approx(0.5, abs=1e-15)
    assert float(midpoint_inner_branch(1.0)) == pytest.approx(0.375, abs=1e-15)
    assert float(midpoint_outer_branch(1.0)) == pytest.approx(0.375, abs=1e-15)


@pytest.mark.parametrize("cdf", [cdf_uniform_radius, cdf_uniform_midpoint, cdf_endpoints, cdf_gaussian])
def test_continuity_across_one(cdf):
    eps = 1e-8
    assert abs(float(cdf(1 - eps)) - float(cdf(1 + eps))) <= 1e-6


def test_radius_limit_at_large_r():
    assert abs(cdf_uniform_radius(1e6) - 1.0) <= 1e-5


def test_ordering_inside_disk():
    for r in np.linspace(0, 1, 51):
        assert cdf_uniform_radius(r) >= cdf_uniform_midpoint(r)
        assert cdf_uniform_radius(r) >= cdf_endpoints(r) - 1e-15


# --- gaussian -----------------------------------------------------------------

@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0, 12.0])
def test_gaussian_against_mpmath(r):
    ref = mp_gaussian(r)
    assert cdf_gaussian(r) == pytest.approx(ref, abs=1e-13)
    assert cdf_gaussian_quadrature(r) == pytest.approx(ref, abs=1e-11)


def test_gaussian_zero_and_monotone():
    assert cdf_gaussian(0.0) == 0.0
    v = cdf_gaussian(np.arange(0, 20.0001, 0.1))
    assert np.all(np.diff(v) >= 0) and v[-1] <= 1.0
    assert cdf_gaussian(1e4) == pytest.approx(1.0, abs=1e-3)


# --- transform ---------------------------------------------------------------

@pytest.mark.parametrize("r", [0.1, 0.5, 1.0])
def test_transform_small_r(r):
    assert transform_cdf(builtin("radius"), r) == pytest.approx(r * r / 2, abs=1e-10)
    assert transform_cdf(builtin("midpoint"), r) == pytest.approx(3 * r**4 / 8, abs=1e-10)


@pytest.mark.parametrize("r", [0.2, 0.9, 1.5, 4.0])
def test_transform_endpoints(r):
    assert transform_cdf(builtin("endpoints"), r) == pytest.approx(cdf_endpoints(r), abs=1e-9)


def test_transform_gaussian():
    for r in (0.5, 2.0, 6.0):
        assert transform_cdf(builtin("gaussian"), r) == pytest.approx(cdf_gaussian(r), abs=1e-9)


@pytest.mark.parametrize("name,r", [("radius", 50.0), ("midpoint", 200.0),
                                    ("endpoints", 200.0), ("gaussian", 200.0)])
def test_transform_tends_to_one(name, r):
    assert transform_cdf(builtin(name), r) >= 0.99


def test_transform_tabulated_is_exact_for_linear_cdf():
    m = tabulated([0.0, 0.5, 1.0], [0.0, 0.5, 1.0])
    for r in (0.3, 1.0, 2.5):
        assert transform_cdf(m, r) == pytest.approx(cdf_uniform_radius(r), abs=1e-13)


def test_transform_tabulated_endpoints_converges():
    t = np.linspace(0, 1, 4001)
    m = tabulated(t, 2 / math.pi * np.arcsin(t))
    for r in (0.5, 1.5, 3.0):
        assert transform_cdf(m, r) == pytest.approx(cdf_endpoints(r), abs=1e-4)


def test_transform_rejects_atom():
    m = tabulated([0.0, 1.0], [1e-12, 1.0])  # below the atom tolerance is fine
    assert transform_cdf(m, 0.5) >= 0
    atom = builtin("radius")
    shifted = type(atom)(atom.name, lambda t: 0.1 + 0.9 * np.clip(t, 0, 1), atom.pdf,
                         atom.inv_cdf, 1.0)
    with pytest.raises(AtomError):
        transform_cdf(shifted, 0.5)


# --- the conditional step behind the closed forms -------------------------------

def test_conditional_probability_given_foot_distances(rng):
    t1, t2, r = 0.2, 0.5, 0.8
    n = 400_000
    th = 2 * math.pi * rng.random((n, 2))
    dist, _ = distances(np.full(n, t1), th[:, 0], np.full(n, t2), th[:, 1])
    assert np.mean(dist <= r) == pytest.approx(2 * math.acos(t2 / r) / math.pi, abs=0.01)


# --- regions, dispatch, curves ------------------------------------------------

def test_region_examples():
    assert region_probability("endpoints", 0.0, math.inf, 0.0, 2 * math.pi) == pytest.approx(1.0)
    assert region_probability("endpoints", 0.0, 1.0, 0.0, math.pi / 2) == pytest.approx(1 / 12, abs=1e-12)
    assert region_probability("radius", 0.2, 0.7, 1.0, 1.0) == 0.0
    with pytest.raises(DomainError):
        region_probability("radius", 0.7, 0.2, 0.0, 1.0)


def test_dispatch():
    assert intersection_cdf("ii", 0.5) == pytest.approx(3 * 0.5**4 / 8)
    custom = tabulated([1.0], [1.0])
    assert intersection_cdf(custom, 0.5) == pytest.approx(0.125, abs=1e-13)
    with pytest.raises(DomainError):
        intersection_cdf("custom", 0.5)
    with pytest.raises(DomainError):
        closed_form_cdf("custom")


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(MODELS),
       st.lists(st.floats(0, 1e4, allow_nan=False), min_size=2, max_size=30))
def test_cdfs_monotone_and_bounded(model, pts):
    r = np.unique(np.asarray(pts))
    v = np.asarray(closed_form_cdf(model)(r), dtype=float)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) >= -1e-15)
    scalar = np.array([intersection_cdf(model, x) for x in r])
    assert np.all((scalar >= 0) & (scalar <= 1))
    assert np.all(np.diff(scalar) >= -1e-12)


def test_cdf_curve_roundtrip_and_csv():
    curve = cdf_curve("endpoints", [0.0, 0.5, 1.0, 2.0])
    assert curve.provenance is Provenance.QUADRATURE
    assert cdf_curve("radius", [0.0, 1.0]).provenance is Provenance.CLOSED_FORM
    again = CdfCurve.from_json(curve.to_json())
    assert again == curve
    lines = curve.to_csv().splitlines()
    assert lines[0] == "r,value" and lines[3] == "1,0.33333333333333331"
    assert float(format_number(math.pi)) == math.pi


def test_cdf_curve_validation():
    with pytest.raises(DomainError):
        CdfCurve("x", ((0.0, 0.1), (0.0, 0.2)), Provenance.EMPIRICAL)
    with pytest.raises(DomainError):
        CdfCurve("x", ((0.0, 0.3), (1.0, 0.2)), Provenance.EMPIRICAL)
    with pytest.raises(DomainError):
        CdfCurve("x", ((0.0, 0.3), (1.0, 1.2)), Provenance.EMPIRICAL)
