import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from oracles import brute_star

from cudmcmc.discrepancy import (EXACT_1D, EXACT_GRID, SUP_ESTIMATE, cud_diagnostic,
                                 iid_reference, local_discrepancy, nonoverlapping_tuples,
                                 overlapping_tuples, star_discrepancy)
from cudmcmc.errors import BudgetExceeded, DimensionMismatch, TooShort
from cudmcmc.streams import CUD_LCG, LcgParams, StreamSpec, generator_cycle

unit = st.floats(0.0, 1.0, allow_nan=False)


def test_local_discrepancy_examples():
    assert local_discrepancy([[0.5, 0.5]], [1.0, 1.0]) == 0.0
    assert local_discrepancy([[0.0]], [0.3]) == pytest.approx(0.7)
    assert local_discrepancy([[0.25], [0.75]], [0.5]) == 0.0
    with pytest.raises(DimensionMismatch):
        local_discrepancy([[0.1, 0.2]], [0.5])


def test_star_single_midpoint():
    r = star_discrepancy([0.5])
    assert r.star == 0.5 and r.method == EXACT_1D and r.exact


def test_star_centered_equispaced():
    pts = (2 * np.arange(1, 5) - 1) / 8
    assert star_discrepancy(pts).star == pytest.approx(0.125, abs=1e-15)


def test_star_origin_point_2d():
    r = star_discrepancy([[0.0, 0.0]])
    assert r.star == 1.0 and r.method == EXACT_GRID


@pytest.mark.parametrize("n", [1, 2, 5, 64, 1000])
def test_equispaced_closed_form(n):
    pts = (2 * np.arange(1, n + 1) - 1) / (2 * n)
    assert abs(star_discrepancy(pts).star - 1 / (2 * n)) < 1e-12


def test_full_period_lcg_one_dim_is_one_over_modulus():
    # the residues {1/m, ..., (m-1)/m}: both one-sided gaps are exactly 1/m
    u = generator_cycle(LcgParams(1021, 10))
    assert star_discrepancy(u).star == pytest.approx(1 / 1021, abs=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_exact_2d_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((int(rng.integers(1, 33)), 2))
    assert abs(star_discrepancy(x).star - brute_star(x)) < 1e-10


@pytest.mark.parametrize("seed", range(6))
def test_exact_3d_and_4d_match_brute_force_with_ties(seed):
    rng = np.random.default_rng(100 + seed)
    for d in (3, 4):
        x = np.floor(rng.random((int(rng.integers(1, 12)), d)) * 5) / 5
        assert abs(star_discrepancy(x).star - brute_star(x)) < 1e-12


def test_one_dim_closed_form_agrees_with_grid_scan():
    x = np.random.default_rng(5).random(40)
    assert abs(star_discrepancy(x).star - brute_star(x[:, None])) < 1e-14


def test_budget_switch_and_estimate_is_lower_bound():
    x = np.random.default_rng(1).random((300, 3))
    exact = star_discrepancy(x)
    est = star_discrepancy(x, budget=1000, anchors=500)
    assert exact.method == EXACT_GRID and est.method == SUP_ESTIMATE and not est.exact
    assert est.star <= exact.star + 1e-15
    assert est.star > 0.5 * exact.star
    with pytest.raises(BudgetExceeded):
        star_discrepancy(x, budget=1000, estimate=False)


@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 3)), elements=unit),
       st.data())
def test_local_never_exceeds_star(x, data):
    a = np.array(data.draw(st.lists(unit, min_size=x.shape[1], max_size=x.shape[1])))
    assert abs(local_discrepancy(x, a)) <= star_discrepancy(x).star + 1e-12


@given(arrays(np.float64, st.tuples(st.integers(1, 15), st.integers(1, 3)), elements=unit),
       st.randoms())
def test_permutation_invariance(x, rnd):
    perm = list(range(x.shape[0]))
    rnd.shuffle(perm)
    assert star_discrepancy(x).star == star_discrepancy(x[perm]).star


@given(arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 3)), elements=unit))
def test_star_in_unit_interval(x):
    assert 0.0 <= star_discrepancy(x).star <= 1.0


def test_overlapping_tuples():
    assert np.array_equal(overlapping_tuples([1, 2, 3], 2), [[1, 2], [2, 3]])
    assert np.array_equal(overlapping_tuples([1, 2, 3], 1), [[1], [2], [3]])
    assert np.array_equal(overlapping_tuples([1, 2, 3], 3), [[1, 2, 3]])
    assert np.array_equal(overlapping_tuples([1, 2, 3], 2, cyclic=True), [[1, 2], [2, 3], [3, 1]])
    with pytest.raises(TooShort):
        overlapping_tuples([1, 2], 3)


def test_nonoverlapping_tuples():
    assert np.array_equal(nonoverlapping_tuples([1, 2, 3, 4, 5], 2), [[1, 2], [3, 4]])


def test_diagnostic_d1_windows_coincide():
    spec = StreamSpec(kind=CUD_LCG, params=LcgParams(1031, 394))
    rows = cud_diagnostic(spec, [100, 1030], [1])
    over = [r for r in rows if r.window_kind == "overlapping"]
    non = [r for r in rows if r.window_kind == "nonoverlapping"]
    assert [r.report for r in over] == [r.report for r in non]
    assert over[-1].report.star == pytest.approx(1 / 1031, abs=1e-15)


def test_cud_full_period_beats_quarter_period():
    spec = StreamSpec(kind=CUD_LCG, params=LcgParams(1031, 394))
    for d in (1, 2, 3):
        rows = cud_diagnostic(spec, [1030 // 4, 1030], [d], budget=2e9)
        over = [r.report.star for r in rows if r.window_kind == "overlapping"]
        assert over[1] < over[0]


def test_iid_reference_is_seeded():
    a = iid_reference(64, 2, reps=5, seed=3)
    assert np.array_equal(a, iid_reference(64, 2, reps=5, seed=3))
    assert a.shape == (5,) and np.all((a > 0) & (a < 1))
