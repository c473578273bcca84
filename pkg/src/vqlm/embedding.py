"""Leading-order optimal embedding equation on the unit sphere.

The two linear equations are

    -(Lap + 2) N          = rhsN
    Lap (Lap + 2) X0      = rhsX

with ``Lap`` the axisymmetric Laplacian.  Both operators are diagonal on
Legendre modes: ``-(2 - l(l+1))`` and ``l(l+1)(l(l+1) - 2)``.  Their kernels
(``l = 1`` for N, ``l = 0, 1`` for X0) are fixed to zero in the solver; the
kernel content of the right-hand side must vanish for a solution to exist.
"""

from dataclasses import dataclass
import numpy as np
from numpy.polynomial import legendre as npleg

from .closedform import metric_connection_coefficients, embedding_rhs, area_coefficients, mean_curvature_coefficients
from .s2grid import (LegendreSpectrum, ScalarField, differentiate, from_spectrum,
                     gradient_norm_sq, integrate_s2, laplacian_axisym, to_spectrum)

__all__ = [
    "SolvabilityError",
    "EmbeddingSolution",
    "SOLVABILITY_TOL",
    "solve_N",
    "solve_X0",
    "solve",
    "closed_solution",
    "apply_N_operator",
    "apply_X0_operator",
    "project_out_kernel",
    "embedding_energy",
    "solvability_report",
    "integral_identities",
    "rhs_from_data",
    "series_residual",
]

SOLVABILITY_TOL = 1e-8


class SolvabilityError(ValueError):
    """The right-hand side has a component in the operator kernel."""


@dataclass(frozen=True, eq=False)
class EmbeddingSolution:
    """Solution pair with the kernel content of the data and operator residuals.

    ``kernel_N`` is the ``l = 1`` coefficient of the N right-hand side,
    ``kernel_X`` the ``(l = 0, l = 1)`` coefficients of the X0 right-hand side.
    ``rhs_residuals`` are sup-norm residuals of both equations, with the
    operators applied to the Legendre series of the solution.
    """

    N: ScalarField
    X0: ScalarField
    kernel_N: float
    kernel_X: tuple
    rhs_residuals: tuple


def _modes(n):
    l = np.arange(n, dtype=float)
    return l * (l + 1.0)


def apply_N_operator(f):
    """``-(Lap + 2) f``."""
    return -(laplacian_axisym(f) + 2.0 * f)


def apply_X0_operator(f):
    """``Lap (Lap + 2) f``."""
    return laplacian_axisym(laplacian_axisym(f) + 2.0 * f)


_ONE_MINUS_Z2 = np.array([2.0 / 3.0, 0.0, -2.0 / 3.0])   # 1 - Z^2 = (2/3) P0 - (2/3) P2


def _lap_series(c):
    """``d/dZ[(1-Z^2) d/dZ]`` on a Legendre series, by coefficient calculus."""
    if c.size < 2:
        return np.zeros_like(c)
    out = npleg.legder(npleg.legmul(_ONE_MINUS_Z2, npleg.legder(c)))
    res = np.zeros_like(c)
    k = min(c.size, out.size)
    res[:k] = out[:k]
    return res


def _apply_series(a, kind):
    if kind == "N":
        return -(_lap_series(a) + 2.0 * a)
    if kind == "X0":
        return _lap_series(_lap_series(a) + 2.0 * a)
    raise ValueError(f"unknown operator {kind!r}")


def series_residual(sol, rhs, kind):
    """Sup-norm residual of one equation, evaluated from Legendre series.

    ``sol`` is either a field or its Legendre coefficients.  The coefficients
    are pushed through the differential operator with ``legder``/``legmul``
    (no eigenvalues involved) and compared with the Legendre projection of
    ``rhs`` on the grid nodes.  Passing a field re-analyses its node values,
    which costs roughly ``eps * l_max**4`` of accuracy for the X0 operator.
    """
    a = to_spectrum(sol).coefficients if isinstance(sol, ScalarField) else np.asarray(sol)
    r = to_spectrum(rhs).coefficients
    return float(np.max(np.abs(npleg.legval(rhs.grid.nodes, _apply_series(a, kind) - r))))


def _solve_N_coeffs(rhs, tol):
    c = to_spectrum(rhs).coefficients
    if abs(c[1]) > tol:
        raise SolvabilityError(f"l=1 component of rhs is {c[1]:.3e} (> {tol:g})")
    lam = _modes(c.size) - 2.0
    out = np.zeros_like(c)
    mask = np.arange(c.size) != 1
    out[mask] = c[mask] / lam[mask]
    return out


def _solve_X0_coeffs(rhs, tol):
    c = to_spectrum(rhs).coefficients
    if abs(c[0]) > tol or abs(c[1]) > tol:
        raise SolvabilityError(
            f"kernel components of rhs are l=0: {c[0]:.3e}, l=1: {c[1]:.3e} (> {tol:g})")
    ll = _modes(c.size)
    out = np.zeros_like(c)
    out[2:] = c[2:] / (ll[2:] * (ll[2:] - 2.0))
    return out


def solve_N(rhs, tol=SOLVABILITY_TOL):
    """Solve ``-(Lap + 2) N = rhs`` with the ``l = 1`` mode of N set to zero."""
    return from_spectrum(LegendreSpectrum(rhs.grid, _solve_N_coeffs(rhs, tol)))


def solve_X0(rhs, tol=SOLVABILITY_TOL):
    """Solve ``Lap (Lap + 2) X0 = rhs`` with the ``l = 0, 1`` modes set to zero."""
    return from_spectrum(LegendreSpectrum(rhs.grid, _solve_X0_coeffs(rhs, tol)))


def solve(rhsN, rhsX, tol=SOLVABILITY_TOL):
    """Solve both equations and record kernel content and residuals."""
    aN = _solve_N_coeffs(rhsN, tol)
    aX = _solve_X0_coeffs(rhsX, tol)
    grid = rhsN.grid
    N = from_spectrum(LegendreSpectrum(grid, aN))
    X0 = from_spectrum(LegendreSpectrum(grid, aX))
    cN = to_spectrum(rhsN).coefficients
    cX = to_spectrum(rhsX).coefficients
    res = (series_residual(aN, rhsN, "N"), series_residual(aX, rhsX, "X0"))
    return EmbeddingSolution(N, X0, float(cN[1]), (float(cX[0]), float(cX[1])), res)


def project_out_kernel(f, modes):
    """Remove the listed Legendre modes from ``f``."""
    c = to_spectrum(f).coefficients.copy()
    c[list(modes)] = 0.0
    return from_spectrum(LegendreSpectrum(f.grid, c))


def closed_solution(p, grid):
    """Explicit solution ``N = Z G(Z) / 2``, ``X0 = G(Z) / 2`` with ``G(0) = 0``."""
    Z = grid.nodes
    Gz = p.G(Z)
    N = ScalarField(grid, 0.5 * Z * Gz)
    X0 = ScalarField(grid, 0.5 * Gz)
    rhsN, rhsX = embedding_rhs(p, grid)
    res = (series_residual(N, rhsN, "N"), series_residual(X0, rhsX, "X0"))
    cN = to_spectrum(rhsN).coefficients
    cX = to_spectrum(rhsX).coefficients
    return EmbeddingSolution(N, X0, float(cN[1]), (float(cX[0]), float(cX[1])), res)


def rhs_from_data(sigma_m1, alpha_m1):
    """Right-hand sides from the reduced data ``sigma^(-1) = f Z_a Z_b``, ``alpha^(-1) = g Z_a``.

    Uses ``div(w Z_a) = d/dZ[(1-Z^2) w]`` for axisymmetric ``w``:

    * ``rhsN = 1/2 [div div sigma - tr sigma - Lap tr sigma]``
    * ``rhsX = 2 div alpha``
    """
    grid = sigma_m1.grid
    Z = grid.nodes
    w = 1.0 - Z**2
    f = sigma_m1
    df = differentiate(f)
    # div sigma = [f'(1-Z^2) - 3 Z f] Z_a
    div_sigma = df * w - 3.0 * Z * f
    divdiv = differentiate(div_sigma * w)
    tr = f * w
    rhsN = 0.5 * (divdiv - tr - laplacian_axisym(tr))
    rhsX = 2.0 * differentiate(alpha_m1 * w)
    return rhsN, rhsX


def embedding_energy(N, X0):
    """``int [ |grad N|^2 / 2 - N^2 - X0 Lap(Lap+2) X0 / 4 ] dV``.

    The X0 term is integrated by parts to ``(Lap X0)^2 - 2 |grad X0|^2``,
    which only needs two derivatives.
    """
    lapX = laplacian_axisym(X0)
    integrand = (0.5 * gradient_norm_sq(N) - N * N
                 - 0.25 * (lapX * lapX - 2.0 * gradient_norm_sq(X0)))
    return integrate_s2(integrand)


def solvability_report(p, grid):
    """Moments that must vanish for the leading-order theory to apply.

    Returns a dict with

    * ``h_condition``: ``|int (V_m1 + bh_m1) dV|``
    * ``alpha_moment_x``, ``alpha_moment_y``: ``int X^i rhsX dV`` for the
      equatorial coordinates, zero by axisymmetry
    * ``alpha_moment_z``: ``|int Z rhsX dV|``
    * ``rhsN_l1``: ``|int Z rhsN dV|``, the solvability moment of the N equation
    """
    V1, _ = area_coefficients(p, grid)
    bh1, _ = mean_curvature_coefficients(p, grid)
    rhsN, rhsX = embedding_rhs(p, grid)
    Z = grid.nodes
    return {
        "h_condition": abs(integrate_s2(V1 + bh1)),
        # int cos(phi) dphi = int sin(phi) dphi = 0 for any axisymmetric integrand
        "alpha_moment_x": 0.0,
        "alpha_moment_y": 0.0,
        "alpha_moment_z": abs(integrate_s2(rhsX * Z)),
        "rhsN_l1": abs(integrate_s2(rhsN * Z)),
    }


def integral_identities(sol, p):
    """Both sides of the two integral identities satisfied by a solution.

    ``lhs1 = int (|grad N|^2/2 - N^2)``, ``rhs1 = int F^2 Z^2 (1-Z^2) / 8``,
    ``lhs2 = int [(Lap X0)^2 - 2 |grad X0|^2]``, ``rhs2 = int (F')^2 (1-Z^2)^2 / 4``.
    """
    N, X0 = sol.N, sol.X0
    grid = N.grid
    Z = grid.nodes
    w = 1.0 - Z**2
    F = p.F(Z)
    F1 = p.dF(Z)
    lhs1 = integrate_s2(0.5 * gradient_norm_sq(N) - N * N)
    rhs1 = integrate_s2(ScalarField(grid, 0.125 * F**2 * Z**2 * w))
    lapX = laplacian_axisym(X0)
    lhs2 = integrate_s2(lapX * lapX - 2.0 * gradient_norm_sq(X0))
    rhs2 = integrate_s2(ScalarField(grid, 0.25 * F1**2 * w**2))
    return {"lhs1": lhs1, "rhs1": rhs1, "lhs2": lhs2, "rhs2": rhs2}
