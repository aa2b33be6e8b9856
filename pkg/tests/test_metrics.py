import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsdem.exceptions import (
    DegenerateSelectionError,
    InvalidInputError,
    InvalidRangeError,
    UndefinedIndexError,
)
from fsdem.metrics import (
    FitnessWeights,
    MetricRange,
    bfi,
    build_curve,
    consistency_index,
    finite_differences,
    fitness,
    fsdem_score,
    kuncheva_stability,
    nogueira_stability,
    penalty,
    stability_score,
    subsample_observations,
    trapezoid_integral,
)

from .oracles import expected_overlap, riemann_integral

LINE = build_curve([(1, 0.5), (2, 0.7), (3, 0.9)])


@st.composite
def curves(draw, max_k=20, monotone=None):
    ks = sorted(draw(st.sets(st.integers(1, max_k), min_size=2, max_size=max_k)))
    vals = draw(st.lists(st.floats(0, 1), min_size=len(ks), max_size=len(ks)))
    if monotone == "up":
        vals = sorted(vals)
    elif monotone == "down":
        vals = sorted(vals, reverse=True)
    return build_curve(zip(ks, vals))


@st.composite
def curve_and_range(draw, **kw):
    c = draw(curves(**kw))
    lo, hi = c.support
    a = draw(st.integers(lo, hi - 1))
    b = draw(st.integers(a + 1, hi))
    return c, MetricRange(a, b)


# -- build_curve ---------------------------------------------------------------

def test_build_curve_sorts():
    c = build_curve([(3, 0.9), (1, 0.5), (2, 0.7)])
    assert c.points == [(1, 0.5), (2, 0.7), (3, 0.9)]


def test_interpolation_midpoint():
    assert build_curve([(1, 0.5), (2, 0.7)])(1.5) == pytest.approx(0.6, abs=1e-15)


@pytest.mark.parametrize("obs", [[(1, 0.5), (1, 0.6)], [(1, 0.5)], []])
def test_build_curve_rejects(obs):
    with pytest.raises(InvalidInputError):
        build_curve(obs)


def test_values_outside_bounds_rejected():
    with pytest.raises(InvalidInputError):
        build_curve([(1, 0.5), (2, 1.5)])
    # other bounded measures are fine when declared
    c = build_curve([(1, 5.0), (2, 7.0)], bounds=(0, 10))
    assert fsdem_score(c, MetricRange(1, 2)) == 6.0


# -- quadrature ----------------------------------------------------------------

@pytest.mark.parametrize("c", [0.0, 0.25, 1.0])
def test_constant_curve_integral(c):
    curve = build_curve([(k, c) for k in range(1, 8)])
    assert trapezoid_integral(curve, MetricRange(2, 6)) == pytest.approx(4 * c, abs=1e-15)
    assert fsdem_score(curve, MetricRange(2, 6)) == c


def test_line_integral_matches_oracle():
    assert trapezoid_integral(LINE, MetricRange(1, 3)) == pytest.approx(1.4, abs=1e-12)
    assert riemann_integral(LINE.ks, LINE.values, 1, 3) == pytest.approx(1.4, abs=1e-9)
    assert fsdem_score(LINE, MetricRange(1, 3)) == pytest.approx(0.7, abs=1e-12)


def test_triangle():
    assert trapezoid_integral(build_curve([(1, 0.0), (3, 1.0)]), MetricRange(1, 3)) == pytest.approx(1.0)


def test_interpolated_endpoints():
    # nodes at 1 and 5 only; [2, 4] cuts both segments' ends
    c = build_curve([(1, 0.0), (5, 1.0)])
    assert trapezoid_integral(c, MetricRange(2, 4)) == pytest.approx(riemann_integral(c.ks, c.values, 2, 4), abs=1e-9)
    assert fsdem_score(c, MetricRange(2, 4)) == pytest.approx(0.5)


def test_range_outside_support():
    with pytest.raises(InvalidRangeError):
        trapezoid_integral(LINE, MetricRange(1, 4))
    with pytest.raises(InvalidRangeError):
        MetricRange(3, 3)


@settings(max_examples=60, deadline=None)
@given(curve_and_range(max_k=12))
def test_integral_matches_riemann_oracle(cr):
    c, r = cr
    assert trapezoid_integral(c, r) == pytest.approx(riemann_integral(c.ks, c.values, r.a, r.b), abs=1e-9)


@given(curve_and_range())
def test_fsdem_within_observed_bounds(cr):
    c, r = cr
    s = fsdem_score(c, r)
    assert min(c.values) - 1e-12 <= s <= max(c.values) + 1e-12


def test_range_restriction_flips_winner():
    # two curves crossing at k=6: A better early, B better late
    ks = range(1, 12)
    a = build_curve([(k, 0.9 - 0.04 * k) for k in ks])
    b = build_curve([(k, 0.6 + 0.01 * k) for k in ks])
    assert fsdem_score(a, MetricRange(1, 5)) > fsdem_score(b, MetricRange(1, 5))
    assert fsdem_score(a, MetricRange(7, 11)) < fsdem_score(b, MetricRange(7, 11))


# -- derivatives / stability ---------------------------------------------------

def test_finite_differences_line():
    got = finite_differences(LINE, MetricRange(1, 3))
    assert [x for x, _ in got] == [1, 2, 3]
    assert [s for _, s in got] == pytest.approx([0.2, 0.2, 0.2], abs=1e-12)


def test_finite_differences_one_sided_at_edges():
    # kink at 2: forward slope at 1 is 0.4, backward at 3 is 0
    c = build_curve([(1, 0.1), (2, 0.5), (3, 0.5)])
    got = dict(finite_differences(c, MetricRange(1, 3)))
    assert got[1] == pytest.approx(0.4)
    assert got[2] == pytest.approx(0.2)
    assert got[3] == 0.0


def test_finite_differences_on_interpolated_grid():
    # only endpoints observed; every integer slope equals the chord slope
    c = build_curve([(1, 0.2), (9, 0.6)])
    assert all(s == pytest.approx(0.05, abs=1e-15) for _, s in finite_differences(c, MetricRange(1, 9)))


def test_stability_examples():
    assert stability_score(LINE, MetricRange(1, 3)) == pytest.approx(0.2, abs=1e-12)
    flat = build_curve([(k, 0.8) for k in range(1, 6)])
    assert stability_score(flat, MetricRange(1, 5)) == 0.0


@given(st.floats(-0.1, 0.1), st.integers(1, 5), st.integers(2, 15))
def test_linear_curve_exact(m, a, width):
    b = a + width
    c = build_curve([(k, 0.5 + m * (k - a)) for k in range(a, b + 1)], bounds=(-2, 3))
    r = MetricRange(a, b)
    assert all(abs(s - m) <= 1e-12 for _, s in finite_differences(c, r))
    assert stability_score(c, r) == pytest.approx(m, abs=1e-12)


@given(curve_and_range())
def test_stability_bounded(cr):
    c, r = cr
    assert -1.0 <= stability_score(c, r) <= 1.0


@given(curve_and_range(monotone="up"))
def test_stability_sign_follows_trend(cr):
    c, r = cr
    grid = [c(x) for x in r.grid()]
    s = stability_score(c, r)
    if grid[-1] > grid[0]:
        assert s > 0
    else:
        assert s == 0


# -- subsampling ---------------------------------------------------------------

@pytest.mark.parametrize(
    "ks,stride,expected",
    [
        (list(range(1, 11)), 2, [1, 3, 5, 7, 9, 10]),
        (list(range(1, 11)), 1, list(range(1, 11))),
        ([1, 2, 3], 5, [1, 3]),
        ([4], 3, [4]),
    ],
)
def test_subsample(ks, stride, expected):
    assert subsample_observations(ks, stride) == expected


def test_subsample_empty():
    with pytest.raises(InvalidInputError):
        subsample_observations([], 2)


# -- Nogueira ------------------------------------------------------------------

def _rows(d, *subsets):
    z = np.zeros((len(subsets), d), dtype=int)
    for i, s in enumerate(subsets):
        z[i, list(s)] = 1
    return z


def test_nogueira_identical_runs():
    assert nogueira_stability(_rows(6, {0, 1}, {0, 1}, {0, 1})) == 1.0


def test_nogueira_paper_scenario():
    # age, salary_eur, salary_usd, size, dist_km, dist_mi
    z = _rows(6, {1, 3, 4}, {2, 3, 5})
    assert nogueira_stability(z) == pytest.approx(-1 / 3, abs=1e-12)


def test_nogueira_disjoint():
    # each column has variance 0.5; 1 - 0.5 / 0.25
    assert nogueira_stability(_rows(6, {0, 1, 2}, {3, 4, 5})) == pytest.approx(-1.0)


def test_nogueira_degenerate():
    with pytest.raises(DegenerateSelectionError):
        nogueira_stability(np.ones((3, 4)))
    with pytest.raises(InvalidInputError):
        nogueira_stability(_rows(4, {0}))


@given(st.data())
def test_nogueira_permutation_invariance(data):
    d = data.draw(st.integers(3, 8))
    n_runs = data.draw(st.integers(2, 6))
    rows = [data.draw(st.sets(st.integers(0, d - 1), min_size=1, max_size=d - 1)) for _ in range(n_runs)]
    z = _rows(d, *rows)
    base = nogueira_stability(z)
    row_perm = data.draw(st.permutations(range(n_runs)))
    col_perm = data.draw(st.permutations(range(d)))
    assert nogueira_stability(z[list(row_perm)]) == pytest.approx(base, abs=1e-12)
    assert nogueira_stability(z[:, list(col_perm)]) == pytest.approx(base, abs=1e-12)


# -- Kuncheva ------------------------------------------------------------------

def test_consistency_examples():
    assert consistency_index({0, 1, 2}, {2, 1, 0}, 6) == 1.0
    assert consistency_index({0, 1, 2}, {2, 3, 4}, 6) == pytest.approx(-1 / 3)
    with pytest.raises(UndefinedIndexError):
        consistency_index(set(range(6)), set(range(6)), 6)
    with pytest.raises(UndefinedIndexError):
        consistency_index(set(), set(), 6)


@pytest.mark.parametrize("k,d", [(3, 6), (2, 5), (4, 7)])
def test_consistency_matches_chance_corrected_overlap(k, d):
    # (r - E[r]) / (k - E[r]) with E[r] from enumeration
    e = expected_overlap(k, d)
    for r in range(0, k + 1):
        if 2 * k - r > d:
            continue
        a = set(range(k))
        b = set(range(r)) | set(range(k, 2 * k - r))
        assert consistency_index(a, b, d) == pytest.approx((r - e) / (k - e), abs=1e-12)


@given(st.data())
def test_consistency_symmetric(data):
    d = data.draw(st.integers(3, 10))
    k = data.draw(st.integers(1, d - 1))
    a = data.draw(st.sets(st.integers(0, d - 1), min_size=k, max_size=k))
    b = data.draw(st.sets(st.integers(0, d - 1), min_size=k, max_size=k))
    assert consistency_index(a, b, d) == consistency_index(b, a, d)
    assert (consistency_index(a, b, d) == 1.0) == (a == b)


def test_kuncheva_examples():
    assert kuncheva_stability([[0, 1, 2, 3]] * 4, 2, 6) == 1.0
    assert kuncheva_stability([[0, 1, 5], [0, 2, 4]], 2, 6) == consistency_index([0, 1], [0, 2], 6)
    fam = [[0, 1, 2], [0, 1, 3], [3, 4, 5]]
    pairwise = [consistency_index(fam[i], fam[j], 6) for i in range(3) for j in range(i + 1, 3)]
    assert pairwise == pytest.approx([1 / 3, -1, -1 / 3])
    assert kuncheva_stability(fam, 3, 6) == pytest.approx(-1 / 3)


@given(st.data())
def test_kuncheva_permutation_invariant(data):
    d = data.draw(st.integers(4, 9))
    seqs = [data.draw(st.permutations(range(d))) for _ in range(data.draw(st.integers(2, 5)))]
    k = data.draw(st.integers(1, d - 1))
    perm = data.draw(st.permutations(seqs))
    assert kuncheva_stability(perm, k, d) == pytest.approx(kuncheva_stability(seqs, k, d), abs=1e-12)


# -- fitness / BFI -------------------------------------------------------------

def test_penalty_endpoints():
    assert penalty(0) == 0.0
    assert penalty(1) == pytest.approx(1.0, abs=1e-15)


def test_fitness_examples():
    w = FitnessWeights(0.9, 0.1)
    assert fitness(0.8, 3, 6, FitnessWeights(0.9, 0.0)) == pytest.approx(0.72)
    expected = 0.9 * 0.9 - 0.1 * (math.exp(0.5) - 1) / (math.e - 1)
    assert fitness(0.9, 3, 6, w) == pytest.approx(expected, abs=1e-15)
    assert fitness(0.9, 3, 6, w) == pytest.approx(0.77225, abs=1e-5)
    assert fitness(0.85, 6, 6, w) == pytest.approx(0.665, abs=1e-12)
    with pytest.raises(InvalidInputError):
        fitness(0.9, 0, 6, w)
    with pytest.raises(InvalidInputError):
        fitness(0.9, 7, 6, w)


def test_bfi_examples():
    w = FitnessWeights()
    f = fitness(0.9, 3, 6, w)
    assert bfi(f, f) == 0.0
    assert bfi(f, fitness(0.85, 6, 6, w)) == pytest.approx(0.10725, abs=1e-5)
    raw = FitnessWeights(1.0, 0.0)
    assert bfi(fitness(0.9, 2, 6, raw), fitness(0.7, 6, 6, raw)) == pytest.approx(0.2)


@given(st.floats(0, 1), st.integers(1, 20), st.floats(0.01, 1), st.floats(0.01, 1))
def test_fitness_monotone(m, d, k_c, k_p):
    w = FitnessWeights(k_c, k_p)
    vals = [fitness(m, c, d, w) for c in range(1, d + 1)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert fitness(min(m + 0.1, 1.0), 1, d, w) >= fitness(m, 1, d, w)


@given(curve_and_range(monotone="down"))
def test_stability_negative_when_falling(cr):
    c, r = cr
    s = stability_score(c, r)
    assert s < 0 if c(r.b) < c(r.a) else s == 0
