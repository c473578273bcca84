import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vqlm.s2grid import ScalarField
from vqlm.seriesx import DEFAULT_SCHEDULE, richardson_fit

DS = (100.0, 200.0, 400.0, 800.0)


def test_exact_quadratic_recovered():
    fit = richardson_fit([(d, np.array([3 + 5 / d + 7 / d**2])) for d in DS])
    for got, want in ((fit.a0[0], 3), (fit.a1[0], 5), (fit.a2[0], 7)):
        assert abs(got - want) <= 1e-10 * abs(want)


def test_fit_matches_extended_precision_solution_of_the_same_samples():
    # rounding the samples to doubles already moves the exact fit of a2 by ~2e-10;
    # the fit itself must agree with the 50-digit solve of those rounded samples
    mp.mp.dps = 50
    v = [3 + 5 / d + 7 / d**2 for d in DS]
    A = mp.matrix([[mp.mpf(1) / mp.mpf(d) ** k for k in range(4)] for d in DS])
    exact = mp.lu_solve(A, mp.matrix([mp.mpf(x) for x in v]))
    fit = richardson_fit([(d, np.array([x])) for d, x in zip(DS, v)])
    got = (fit.a0[0], fit.a1[0], fit.a2[0], fit.a3[0])
    for k in range(4):
        assert abs(got[k] - float(exact[k])) <= 1e-13 * DS[0] ** k


def test_pure_cubic_is_absorbed_by_nuisance_term():
    fit = richardson_fit([(d, np.array([1 / d**3])) for d in DS])
    assert max(abs(fit.a0[0]), abs(fit.a1[0]), abs(fit.a2[0])) <= 1e-8
    assert fit.a3[0] == pytest.approx(1.0, rel=1e-8)


def test_three_samples_fit_exactly():
    fit = richardson_fit([(d, np.array([2 - 1 / d + 4 / d**2])) for d in (100.0, 300.0, 900.0)])
    assert np.allclose([fit.a0[0], fit.a1[0], fit.a2[0]], [2, -1, 4], atol=1e-9, rtol=0)
    assert fit.a3[0] == 0


def test_fields_keep_their_grid(grid):
    samples = [(d, grid.sample(lambda z, d=d: z + z**2 / d)) for d in DEFAULT_SCHEDULE]
    fit = richardson_fit(samples)
    assert isinstance(fit.a1, ScalarField) and fit.a1.grid is grid
    assert np.max(np.abs(fit.a1.values - grid.nodes**2)) <= 1e-10
    assert np.max(np.abs(fit.evaluate(500.0) - samples[1][1].values)) <= 1e-12


@pytest.mark.parametrize("samples,exc", [
    ([(100.0, np.zeros(2)), (200.0, np.zeros(2))], ValueError),
    ([], ValueError),
    ([(100.0, np.zeros(1)), (100.0, np.zeros(1)), (200.0, np.zeros(1)), (400.0, np.zeros(1))],
     np.linalg.LinAlgError),
    ([(-1.0, np.zeros(1)), (100.0, np.zeros(1)), (200.0, np.zeros(1))], ValueError),
])
def test_invalid_inputs(samples, exc):
    with pytest.raises(exc):
        richardson_fit(samples)


def test_only_second_order_supported():
    with pytest.raises(ValueError):
        richardson_fit([(d, np.zeros(1)) for d in DS], order=3)


coef = st.floats(-10, 10)


@settings(max_examples=80, deadline=None)
@given(a0=coef, a1=coef, a2=coef, scale=st.floats(50, 1e4))
def test_exact_recovery_property(a0, a1, a2, scale):
    ds = [scale, 2 * scale, 4 * scale, 8 * scale]
    fit = richardson_fit([(d, np.array([a0 + a1 / d + a2 / d**2])) for d in ds])
    # relative to the size of each term at the smallest d
    assert abs(fit.a0[0] - a0) <= 1e-10 * (1 + abs(a0) + abs(a1) / scale + abs(a2) / scale**2)
    assert abs(fit.a1[0] - a1) <= 1e-10 * (abs(a1) + scale * (1 + abs(a0)) + abs(a2) / scale)
    assert abs(fit.a2[0] - a2) <= 1e-10 * (abs(a2) + scale**2 * (1 + abs(a0)) + scale * abs(a1))


@settings(max_examples=50, deadline=None)
@given(a=st.lists(st.floats(-5, 5), min_size=6, max_size=6))
def test_residual_bounds_the_sample_misfit(a):
    v = lambda d: sum(c / d**k for k, c in enumerate(a))
    fit = richardson_fit([(d, np.array([v(d)])) for d in DEFAULT_SCHEDULE])
    assert np.all(fit.residual >= 0)
    for d in DEFAULT_SCHEDULE:
        approx = fit.evaluate(d)[0] + fit.a3[0] / d**3
        assert abs(approx - v(d)) <= fit.residual[0] + 1e-14


@settings(max_examples=50, deadline=None)
@given(a=st.lists(st.floats(-5, 5), min_size=6, max_size=6).filter(lambda a: abs(a[4]) + abs(a[5]) > 0.1))
def test_adding_a_larger_distance_does_not_worsen_a2(a):
    v = lambda d: sum(c / d**k for k, c in enumerate(a))
    base = [250.0, 500.0, 1000.0, 2000.0]
    err = lambda ds: abs(richardson_fit([(d, np.array([v(d)])) for d in ds]).a2[0] - a[2])
    # larger-d samples carry less truncation; allow only rounding-level growth
    assert err(base + [4000.0]) <= err(base) + 1e-7
