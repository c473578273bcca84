"""Closed-form expansion coefficients of the unit-sphere data, as functions of Z.

Each function takes a profile and a grid and returns :class:`ScalarField`
values.  The formulas are transcribed term by term; the numerical geometry
in :mod:`vqlm.vaidyageom` is the independent check on them.

Tensors are reduced to scalars by axisymmetry:

* ``sigma^(-1)_ab = sigma_m1 * Z_a Z_b``
* ``(alpha_H^(-1))_a = alpha_m1 * Z_a``
"""

from dataclasses import dataclass

from .s2grid import ScalarField

__all__ = [
    "CoefficientSet",
    "coefficient_set",
    "metric_connection_coefficients",
    "embedding_rhs",
    "area_coefficients",
    "mean_curvature_coefficients",
    "divergence_m1",
    "combo_integrand",
    "hnorm_m1",
    "hnorm_m2_correction",
]


def _profile_on(p, grid):
    Z = grid.nodes
    return Z, p.F(Z), p.dF(Z), p.d2F(Z), p.d3F(Z)


def metric_connection_coefficients(p, grid):
    """``(sigma_m1, alpha_m1)``: leading metric and connection coefficients."""
    Z, F, F1, F2, _ = _profile_on(p, grid)
    sigma = F
    alpha = -F1 * Z + 0.25 * F2 * (1 - Z**2)
    return ScalarField(grid, sigma), ScalarField(grid, alpha)


def embedding_rhs(p, grid):
    """Right-hand sides ``(rhsN, rhsX)`` of the linearised embedding equations."""
    Z, F, F1, F2, F3 = _profile_on(p, grid)
    w = 1 - Z**2
    rhsN = -0.5 * F1 * Z * w - F * (1 - 2 * Z**2)
    rhsX = 0.5 * F3 * w**2 - 4 * F2 * Z * w - 2 * F1 * (1 - 3 * Z**2)
    return ScalarField(grid, rhsN), ScalarField(grid, rhsX)


def area_coefficients(p, grid):
    """Area-form coefficients ``(V_m1, V_m2)``."""
    Z, F, F1, _, _ = _profile_on(p, grid)
    w = 1 - Z**2
    V1 = F * w / 2
    V2 = -1.5 * F * Z * w + 0.25 * F1 * w**2 - 0.125 * F**2 * w**2
    return ScalarField(grid, V1), ScalarField(grid, V2)


def mean_curvature_coefficients(p, grid):
    """Divergence-reduced mean curvature coefficients ``(bh_m1, bh_m2)``."""
    Z, F, F1, F2, _ = _profile_on(p, grid)
    w = 1 - Z**2
    bh1 = -F * Z**2 + 0.5 * F1 * Z * w
    bh2 = (0.25 * F2 * Z * w**2
           - 0.5 * F1 * (-1 + 6 * Z**2 - 5 * Z**4)
           + 0.5 * F * (9 * Z**3 - 7 * Z)
           + 0.25 * F**2 * (6 * Z**2 - 7 * Z**4)
           - F * F1 * (0.5 * Z * w**2 - 0.25 * Z**3 * w))
    return ScalarField(grid, bh1), ScalarField(grid, bh2)


def divergence_m1(p, grid):
    """Leading coefficient of ``div(g_s.)``."""
    Z, F, F1, _, _ = _profile_on(p, grid)
    return ScalarField(grid, F * (1 - 3 * Z**2) + F1 * Z * (1 - Z**2))


def combo_integrand(p, grid):
    """``-F Z + F^2 Z^2 (1-Z^2) / 8``, integrally equal to ``V2 + bh2 + V1 bh1``."""
    Z, F, _, _, _ = _profile_on(p, grid)
    return ScalarField(grid, -F * Z + 0.125 * F**2 * Z**2 * (1 - Z**2))


def hnorm_m1(p, grid):
    """Leading coefficient of the undivided ``hhat`` (and of ``|H|``).

    ``hhat = breve_h - div(g_s.)``; the extrinsic-curvature correction to
    ``|H|`` only enters at second order.
    """
    bh1, _ = mean_curvature_coefficients(p, grid)
    return bh1 - divergence_m1(p, grid)


def hnorm_m2_correction(p, grid):
    """``h^(-2) - hhat^(-2) = -(F')^2 (1-Z^2)^2 / 16``."""
    Z, _, F1, _, _ = _profile_on(p, grid)
    return ScalarField(grid, -F1**2 * (1 - Z**2) ** 2 / 16.0)


@dataclass(frozen=True)
class CoefficientSet:
    sigma_m1: ScalarField
    alpha_m1: ScalarField
    V_m1: ScalarField
    V_m2: ScalarField
    bh_m1: ScalarField
    bh_m2: ScalarField
    div_m1: ScalarField
    rhsN: ScalarField
    rhsX: ScalarField
    combo: ScalarField


def coefficient_set(p, grid):
    sigma, alpha = metric_connection_coefficients(p, grid)
    rhsN, rhsX = embedding_rhs(p, grid)
    V1, V2 = area_coefficients(p, grid)
    bh1, bh2 = mean_curvature_coefficients(p, grid)
    return CoefficientSet(sigma, alpha, V1, V2, bh1, bh2, divergence_m1(p, grid),
                          rhsN, rhsX, combo_integrand(p, grid))
