import itertools
import json
import math

import numpy as np
import pytest

from chordlab.errors import AmbiguityError, DomainError
from chordlab.geometry import distance_only
from chordlab.measures import chord_from_endpoints
from chordlab.ngon import (
    count_with_multiplicity,
    distinct_count,
    karamata_limit,
    karamata_ratio,
    lines_histogram,
    lines_parallel,
    poonen_rubinstein,
)


def chord(n, i, j):
    return chord_from_endpoints(2 * math.pi * i / n, 2 * math.pi * j / n)


def brute_pair_distances(n, pairings):
    """Distances for the requested pairings of every quadruple, via the generic line code."""
    out, parallel = [], 0
    for a, b, c, d in itertools.combinations(range(n), 4):
        for (i, j), (k, l) in pairings(a, b, c, d):
            l1, l2 = chord(n, i, j), chord(n, k, l)
            if abs(math.sin(l2.foot_angle - l1.foot_angle)) < 1e-9:
                parallel += 1
                continue
            out.append(distance_only(l1, l2))
    return np.array(out), parallel


def crossing(a, b, c, d):
    return [((a, c), (b, d))]


def all_three(a, b, c, d):
    return [((a, c), (b, d)), ((a, b), (c, d)), ((a, d), (b, c))]


def test_square_diagonals_meet_once():
    assert count_with_multiplicity(4, [1.0]).counts_with_multiplicity.tolist() == [1]


def test_hexagon_center_has_three_pairs():
    rep = count_with_multiplicity(6, [0.01, 1.0])
    assert rep.counts_with_multiplicity.tolist() == [3, 15]
    brute, _ = brute_pair_distances(6, crossing)
    assert int(np.sum(brute <= 0.01)) == 3


@pytest.mark.parametrize("n", [7, 10, 13])
def test_multiplicity_counts_match_brute_force(n):
    # radii chosen away from any intersection distance of these polygons
    radii = [0.0, 0.1234, 0.3456, 0.5678, 0.7891, 1.0]
    brute, _ = brute_pair_distances(n, crossing)
    expect = [int(np.sum(brute <= r + 1e-12)) for r in radii]
    assert count_with_multiplicity(n, radii).counts_with_multiplicity.tolist() == expect
    assert expect[-1] == math.comb(n, 4)


def test_counts_monotone_and_normalized():
    rep = count_with_multiplicity(40, np.linspace(0, 1, 21))
    c = rep.counts_with_multiplicity
    assert np.all(np.diff(c) >= 0) and c[-1] == math.comb(40, 4) == rep.total_pairs


def test_thread_count_does_not_change_counts():
    a = count_with_multiplicity(60, [0.3, 0.6, 1.0], threads=1).counts_with_multiplicity
    b = count_with_multiplicity(60, [0.3, 0.6, 1.0], threads=4).counts_with_multiplicity
    assert np.array_equal(a, b)


def test_radius_validation():
    with pytest.raises(DomainError):
        count_with_multiplicity(8, [0.5, 0.2])
    with pytest.raises(DomainError):
        count_with_multiplicity(8, [1.5])
    with pytest.raises(DomainError):
        count_with_multiplicity(3, [0.5])


def test_square_opposite_sides_parallel():
    assert lines_parallel(4, 0, 1, 2, 3)
    rep = lines_histogram(4, [1.0])
    # both pairs of opposite sides of the square
    assert rep.parallel_pairs == 2


def test_pentagon_sides_parallel_to_diagonals():
    # side {1,2} and diagonal {0,3} share the index sum 3, and indeed are parallel
    assert lines_parallel(5, 0, 3, 1, 2)
    l1, l2 = chord(5, 0, 3), chord(5, 1, 2)
    assert abs(math.sin(l2.foot_angle - l1.foot_angle)) < 1e-12
    _, brute_parallel = brute_pair_distances(5, all_three)
    assert lines_histogram(5, [1.0]).parallel_pairs == brute_parallel == 5


@pytest.mark.parametrize("n", [12, 30, 101])
def test_parallel_predicate_matches_geometry(n):
    rng = np.random.default_rng(n)
    quads = list(itertools.combinations(range(n), 4)) if n <= 30 else \
        [tuple(sorted(rng.choice(n, 4, replace=False))) for _ in range(20_000)]
    for a, b, c, d in quads:
        for (i, j), (k, l) in all_three(a, b, c, d):
            s = abs(math.sin(math.pi * ((k + l) - (i + j)) / n))
            if lines_parallel(n, i, j, k, l):
                assert s < 1e-12
            else:
                assert s > 1e-9


@pytest.mark.parametrize("n", [6, 9, 12])
def test_lines_counts_match_brute_force(n):
    radii = [0.4321, 1.0, 1.7654, 3.21, 12.34]
    brute, parallel = brute_pair_distances(n, all_three)
    rep = lines_histogram(n, radii)
    assert rep.parallel_pairs == parallel
    assert rep.lines_counts.tolist() == [int(np.sum(brute <= r + 1e-12)) for r in radii]
    assert rep.nonparallel_total + rep.parallel_pairs == 3 * math.comb(n, 4)


@pytest.mark.parametrize("n", [8, 15, 24])
def test_only_crossing_pairs_land_inside(n):
    rep = lines_histogram(n, [1.0 - 1e-9, 1e9])
    assert rep.lines_counts[0] == math.comb(n, 4)


def test_poonen_rubinstein_values():
    assert poonen_rubinstein(3) == 0
    assert poonen_rubinstein(4) == 1
    assert poonen_rubinstein(6) == 13
    assert poonen_rubinstein(7) == 35
    assert poonen_rubinstein(8) == 49


@pytest.mark.parametrize("n", [5, 6, 7, 8, 9, 10, 12, 18, 24, 30])
def test_distinct_count_matches_formula(n):
    assert distinct_count(n) == poonen_rubinstein(n)


def test_distinct_examples():
    assert distinct_count(5) == 5
    assert distinct_count(6) == 13
    assert distinct_count(8) == 49


@pytest.mark.parametrize("n", [11, 13, 21, 35])
def test_odd_polygons_have_no_multiple_points(n):
    assert poonen_rubinstein(n) == math.comb(n, 4)


def test_formula_is_exact_for_large_n():
    n = 2520  # divisible by 2, 4, 6, 12, 18, 24, 30, 42, 60, 84, 90, 120
    v = poonen_rubinstein(n)
    assert isinstance(v, int) and 0 < v < math.comb(n, 4)
    assert poonen_rubinstein(10**6 + 3) == math.comb(10**6 + 3, 4)


def test_distinct_count_limits():
    with pytest.raises(DomainError):
        distinct_count(121)
    with pytest.raises(AmbiguityError):
        # a coarse tolerance lands many distinct points in the undecidable band
        distinct_count(40, snap_tol=1e-3)


def test_karamata_ratio_edges():
    assert karamata_ratio(30, 1.0) == 1.0
    assert karamata_ratio(31, 0.0) == 0.0
    assert karamata_ratio(30, 0.0) <= 1 / 30


def test_karamata_trend():
    radii = [0.25, 0.5, 0.75, 0.9]
    lim = np.array([karamata_limit(r) for r in radii])
    small = count_with_multiplicity(30, radii)
    big = count_with_multiplicity(150, radii)
    err_small = np.abs(small.counts_with_multiplicity / small.total_pairs - lim)
    err_big = np.abs(big.counts_with_multiplicity / big.total_pairs - lim)
    assert np.all(err_big < err_small)


def test_report_json():
    rep = count_with_multiplicity(8, [0.5, 1.0])
    rep.pr_formula_value = poonen_rubinstein(8)
    data = json.loads(rep.to_json())
    assert set(data) == {"n", "radii", "with_multiplicity", "lines", "parallel_pairs",
                         "distinct_interior", "pr_formula_value"}
    assert data["with_multiplicity"][-1] == 70 and data["pr_formula_value"] == 49
