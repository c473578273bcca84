from fractions import Fraction
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vqlm.s2grid import (ScalarField, build_grid, differentiate, endpoint_values, from_spectrum,
                         gauss_legendre, integrate_s2, laplacian_axisym, legendre_polynomial,
                         to_spectrum)

GRIDS = {n: build_grid(n) for n in (8, 16, 64, 128)}


@pytest.mark.parametrize("n", [8, 16, 64, 128])
def test_nodes_and_weights_match_extended_precision(n):
    g = build_grid(n)
    mp.mp.dps = 40

    def dP(t):
        return n * (t * mp.legendre(n, t) - mp.legendre(n - 1, t)) / (t * t - 1)

    for k in range(0, n, max(1, n // 16)):
        t = mp.mpf(float(g.nodes[k]))
        for _ in range(4):
            t -= mp.legendre(n, t) / dP(t)
        W = 2 / ((1 - t**2) * dP(t) ** 2)
        assert abs(g.nodes[k] - float(t)) <= 1.2e-16
        assert abs(g.weights[k] / float(W) - 1) <= 1e-15


@pytest.mark.parametrize("n", [8, 64, 200])
def test_nodes_and_weights_close_to_numpy_leggauss(n):
    g = build_grid(n)
    x, w = np.polynomial.legendre.leggauss(n)
    # leggauss is itself accurate to about an ulp in nodes and 1e-10 in end weights
    assert np.max(np.abs(g.nodes - x)) <= 4e-16
    assert np.max(np.abs(g.weights - w) / w) <= 1e-10


@pytest.mark.parametrize("n", [8, 9, 64, 128, 129])
def test_grid_invariants(n):
    g = build_grid(n)
    assert g.n == n and g.nodes.shape == (n,)
    assert np.all(np.diff(g.nodes) > 0)
    assert -1 < g.nodes[0] and g.nodes[-1] < 1
    assert np.all(g.weights > 0)
    assert abs(math.fsum(g.weights) - 2.0) <= 1e-14


def test_two_point_rule_is_classical():
    x, w = gauss_legendre(2)
    assert np.allclose(x, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=4e-16, rtol=0)
    assert np.allclose(w, [1.0, 1.0], atol=4e-16, rtol=0)
    assert abs(2 * math.pi * np.sum(w * x**2) - 4 * math.pi / 3) <= 1e-14


@pytest.mark.parametrize("bad", [0, 1, 7, -3, 8.5])
def test_build_grid_rejects_small_or_fractional_n(bad):
    with pytest.raises(ValueError):
        build_grid(bad)


def test_build_grid_is_deterministic():
    a, b = build_grid(96), build_grid(96)
    assert a.nodes.tobytes() == b.nodes.tobytes()
    assert a.weights.tobytes() == b.weights.tobytes()


def test_grid_arrays_are_read_only(grid):
    with pytest.raises(ValueError):
        grid.nodes[0] = 0.0


def test_sphere_area_and_second_moment_n64(grid64):
    assert abs(integrate_s2(grid64.constant(1.0)) - 4 * math.pi) <= 1e-13
    assert abs(integrate_s2(grid64.sample(lambda z: z**2)) - 4 * math.pi / 3) <= 1e-13


def test_integration_examples(grid):
    assert abs(integrate_s2(grid.sample(lambda z: z))) <= 1e-15
    # 3Z^2 is the derivative of Z^3, so the integral is 2*pi*(1 - (-1))
    assert abs(integrate_s2(grid.sample(lambda z: 3 * z**2)) - 4 * math.pi) <= 1e-13
    assert abs(integrate_s2(grid.sample(lambda z: 1 - z**2)) - 8 * math.pi / 3) <= 1e-13


def _exact_monomial_integral(coeffs):
    # 2*pi * int_{-1}^{1} sum_k a_k Z^k dZ with exact rational arithmetic
    total = Fraction(0)
    for k, a in enumerate(coeffs):
        if k % 2 == 0:
            total += Fraction(a) * Fraction(2, k + 1)
    return 2 * math.pi * float(total)


@settings(max_examples=60, deadline=None)
@given(n=st.sampled_from([8, 16, 64]), data=st.data())
def test_quadrature_exact_to_degree_2n_minus_1(n, data):
    g = GRIDS[n]
    deg = data.draw(st.integers(0, 2 * n - 1))
    coeffs = data.draw(st.lists(st.integers(-5, 5), min_size=deg + 1, max_size=deg + 1))
    values = np.polynomial.polynomial.polyval(g.nodes, np.array(coeffs, dtype=float))
    exact = _exact_monomial_integral(coeffs)
    scale = 2 * math.pi * sum(abs(a) * 2 / (k + 1) for k, a in enumerate(coeffs)) or 1.0
    assert abs(integrate_s2(ScalarField(g, values)) - exact) <= 1e-12 * scale


def test_integrate_is_bit_reproducible(grid):
    f = grid.sample(lambda z: np.exp(z) * np.sin(3 * z))
    assert integrate_s2(f) == integrate_s2(ScalarField(grid, f.values.copy()))


def test_differentiate_examples(grid):
    Z = grid.nodes
    assert np.max(np.abs(differentiate(grid.sample(lambda z: z**3)).values - 3 * Z**2)) <= 1e-11
    assert np.max(np.abs(differentiate(grid.constant(7.0)).values)) <= 1e-12
    # closed form of the derivative of P_5
    dP5 = (315 * Z**4 - 210 * Z**2 + 15) / 8
    assert np.max(np.abs(differentiate(legendre_polynomial(grid, 5)).values - dP5)) <= 1e-11


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=1, max_size=60))
def test_differentiate_exact_on_polynomials(coeffs):
    g = GRIDS[64]
    c = np.array(coeffs)
    f = ScalarField(g, np.polynomial.polynomial.polyval(g.nodes, c))
    ref = np.polynomial.polynomial.polyval(g.nodes, np.polynomial.polynomial.polyder(c)) if c.size > 1 \
        else np.zeros(g.n)
    scale = max(1.0, np.sum(np.abs(c) * np.arange(c.size) ** 2))
    assert np.max(np.abs(differentiate(f).values - ref)) <= 1e-11 * scale


def test_laplacian_examples(grid):
    Z = grid.nodes
    assert np.max(np.abs(laplacian_axisym(grid.sample(lambda z: z)).values + 2 * Z)) <= 1e-12
    assert np.max(np.abs(laplacian_axisym(grid.sample(lambda z: z**2)).values - (2 - 6 * Z**2))) <= 1e-12
    assert np.max(np.abs(laplacian_axisym(grid.constant(1.0)).values)) <= 1e-12


@pytest.mark.parametrize("n", [16, 128])
def test_laplacian_eigenstructure_all_modes(n):
    g = GRIDS[n]
    for l in range(n - 2):
        # P_l evaluated in 40-digit arithmetic, then rounded
        P = np.array([float(mp.legendre(l, mp.mpf(float(z)))) for z in g.nodes])
        err = np.max(np.abs(laplacian_axisym(ScalarField(g, P)).values + l * (l + 1) * P))
        assert err <= 1e-10, (l, err)


def test_laplacian_matches_direct_differentiation(grid):
    f = grid.sample(lambda z: np.exp(z) + z**5)
    direct = differentiate(ScalarField(grid, (1 - grid.nodes**2) * differentiate(f).values))
    assert np.max(np.abs(laplacian_axisym(f).values - direct.values)) <= 1e-10


smooth = st.tuples(st.floats(-2, 2), st.floats(-3, 3), st.floats(-1, 1))


def _field(g, terms):
    return g.sample(lambda z: sum(a * np.sin(b * z + c) for a, b, c in terms) + 0 * z)


@settings(max_examples=40, deadline=None)
@given(st.lists(smooth, min_size=1, max_size=4))
def test_derivative_identity(terms):
    g = GRIDS[128]
    f = _field(g, terms)
    fm, fp = endpoint_values(f)
    exact_m = sum(a * math.sin(-b + c) for a, b, c in terms)
    exact_p = sum(a * math.sin(b + c) for a, b, c in terms)
    assert abs(fm - exact_m) <= 1e-11 and abs(fp - exact_p) <= 1e-11
    assert abs(integrate_s2(differentiate(f)) - 2 * math.pi * (fp - fm)) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(smooth, min_size=1, max_size=3), st.lists(smooth, min_size=1, max_size=3))
def test_laplacian_self_adjoint(t1, t2):
    g = GRIDS[128]
    f, h = _field(g, t1), _field(g, t2)
    assert abs(integrate_s2(f * laplacian_axisym(h)) - integrate_s2(h * laplacian_axisym(f))) <= 1e-10


def test_spectrum_examples(grid):
    c = to_spectrum(grid.sample(lambda z: z)).coefficients
    assert abs(c[1] - 1) <= 1e-13 and np.max(np.abs(np.delete(c, 1))) <= 1e-13
    c = to_spectrum(grid.sample(lambda z: z**2)).coefficients
    assert abs(c[0] - 1 / 3) <= 1e-14 and abs(c[2] - 2 / 3) <= 1e-14
    t = grid.sample(lambda z: np.tanh(2 * z))
    assert np.max(np.abs(from_spectrum(to_spectrum(t)).values - t.values)) <= 1e-10


def test_spectrum_matches_quadrature_projection(grid):
    f = grid.sample(lambda z: np.exp(z))
    l = np.arange(grid.n)
    direct = (2 * l + 1) / 2 * (grid.legendre_matrix @ (grid.weights * f.values))
    assert np.max(np.abs(to_spectrum(f).coefficients - direct)) <= 1e-13


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=128))
def test_roundtrip_on_band_limited_fields(coeffs):
    g = GRIDS[128]
    values = np.polynomial.legendre.legval(g.nodes, np.array(coeffs))
    f = ScalarField(g, values)
    scale = max(1.0, np.sum(np.abs(coeffs)))
    assert np.max(np.abs(from_spectrum(to_spectrum(f)).values - values)) <= 1e-12 * scale
    assert np.max(np.abs(to_spectrum(f).coefficients[:len(coeffs)] - coeffs)) <= 1e-12 * scale


def test_scalar_field_validation(grid):
    with pytest.raises(ValueError):
        ScalarField(grid, np.zeros(grid.n - 1))
    bad = np.zeros(grid.n)
    bad[3] = np.nan
    with pytest.raises(ValueError):
        ScalarField(grid, bad)
    f = grid.constant(1.0)
    with pytest.raises(AttributeError):
        f.values = np.zeros(grid.n)
    with pytest.raises(ValueError):
        f.values[0] = 2.0


def test_scalar_field_arithmetic(grid):
    f = grid.sample(lambda z: z)
    g = grid.constant(2.0)
    assert np.allclose((f * g + 1 - f / g).values, 1.5 * grid.nodes + 1)
    assert np.allclose((2 - f).values, 2 - grid.nodes)
    assert np.allclose((-f) ** 2, grid.nodes**2)
    assert (f + g).grid is grid
