from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from vqlm import MassAspectProfile, parse_profile, preset
from vqlm.loopinv import cap_integral, closed_invariant, delta_data, invariant
from vqlm.s2grid import LatitudeGrid

AFFINE = parse_profile("affine:m0=1,a=0.5,m_ref=1")
C_VALUES = (-0.8, -0.5, -0.2, 0.2, 0.5, 0.8)


def test_delta_data_examples(grid):
    a, b = delta_data(preset("constant", m0=2), grid)
    assert np.all(a.values == 0) and np.all(b.values == 0)
    g = LatitudeGrid(2, np.array([0.0, 0.5]), np.array([1.0, 1.0]))
    a, b = delta_data(AFFINE, g)
    assert a.values[0] == 0 and b.values[0] == 0
    assert a.values[1] == pytest.approx(0.09375, abs=1e-16)
    assert b.values[1] == pytest.approx(-0.21875, abs=1e-16)


def test_c_half_example():
    s = invariant(AFFINE, 0.5)
    assert s.closed == float(Fraction(3, 256))
    assert abs(s.numeric - s.closed) <= 1e-10


@pytest.mark.parametrize("c", C_VALUES)
def test_numeric_matches_closed(c):
    s = invariant(AFFINE, c)
    assert s.error <= 1e-8
    assert s.numeric == abs(s.signed_numeric)


@pytest.mark.parametrize("c", C_VALUES)
def test_cap_integral_matches_adaptive_quadrature(c):
    def integrand(z):
        a, b = (float(v) for v in (0.5 * (AFFINE.F(z) - 1) * (1 - z * z),
                                    -(AFFINE.F(z) - 1) * (1 - 2 * z * z)
                                    - 0.5 * AFFINE.dF(z) * z * (1 - z * z)))
        return a + b
    ref, _ = integrate.quad(integrand, c, 1.0, epsabs=1e-14, epsrel=1e-12)
    assert cap_integral(AFFINE, c) == pytest.approx(ref / 4.0, abs=1e-14)


def test_constant_profile_invariant_vanishes():
    p = parse_profile("constant:m0=2,m_ref=2")
    for c in C_VALUES:
        assert invariant(p, c).numeric <= 1e-15 and invariant(p, c).closed == 0


def test_closed_form_has_factor_c():
    assert closed_invariant(AFFINE, 0.0) == 0
    assert abs(closed_invariant(AFFINE, 1e-9)) <= 1e-9


@pytest.mark.parametrize("c", C_VALUES)
def test_reflection_for_odd_mass_deficit(c):
    # F - m_ref = Z/2 is odd, so the integrand is odd and the reflected cap flips sign
    above = cap_integral(AFFINE, c, 1.0)
    below = cap_integral(AFFINE, -1.0, -c)
    assert abs(above + below) <= 1e-9
    assert abs(invariant(AFFINE, c).numeric - invariant(AFFINE, -c).numeric) <= 1e-9


def _bump(lo, hi):
    """Compactly supported C-infinity bump on (lo, hi) and its derivative."""
    def parts(z):
        z = np.asarray(z, dtype=float)
        t = (2 * z - lo - hi) / (hi - lo)
        f = np.zeros_like(z)
        df = np.zeros_like(z)
        inside = np.abs(t) < 1
        ti = t[inside]
        f[inside] = np.exp(-1.0 / (1.0 - ti**2))
        df[inside] = f[inside] * (-2 * ti / (1 - ti**2) ** 2) * 2 / (hi - lo)
        return f, df
    return (lambda z: parts(z)[0]), (lambda z: parts(z)[1])


@pytest.mark.parametrize("c", [-0.5, 0.2, 0.5])
def test_invariant_ignores_interior_perturbations(c):
    bump, dbump = _bump(c + 0.1, 1.0)
    zero = lambda z: 0.0 * np.asarray(z, dtype=float)
    base = AFFINE
    pert = MassAspectProfile(
        label="affine+bump", params=(("m0", 1.0), ("a", 0.5)),
        F=lambda z: base.F(z) + 0.3 * bump(z), dF=lambda z: base.dF(z) + 0.3 * dbump(z),
        d2F=zero, d3F=zero, G=zero, m_ref=1.0)
    s0, s1 = invariant(base, c), invariant(pert, c)
    assert abs((s1.signed_numeric - s0.signed_numeric) - (s1.signed_closed - s0.signed_closed)) <= 1e-8
    assert s1.signed_closed == s0.signed_closed


@pytest.mark.parametrize("c", [-0.99, 0.99, 1.0, -1.5, 2.0, float("nan")])
def test_c_out_of_range(c):
    with pytest.raises(ValueError):
        invariant(AFFINE, c)


@settings(max_examples=40, deadline=None)
@given(c=st.floats(-0.98, 0.98), m0=st.floats(0.1, 2), a=st.floats(-1, 1), lam=st.floats(0.3, 4),
       m_ref=st.floats(0, 3))
def test_boundary_form_property(c, m0, a, lam, m_ref):
    p = preset("tanh_step", m0=m0, a=a, lam=lam, m_ref=m_ref)
    s = invariant(p, c)
    assert s.error <= 1e-8
    assert s.signed_numeric == pytest.approx(s.signed_closed, abs=1e-8)
