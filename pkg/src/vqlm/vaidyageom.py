r"""Exact geometry of unit spheres in the ``t = d`` slice of the Vaidya spacetime.

In coordinates ``t = u + r`` and Cartesian ``y`` with ``r = |y|`` the metric is

.. math::

    g = -(1 - M/r)\,dt^2 - 2 (M/r)\,dt\,dr + \delta + (M/r)\,dr^2,
    \qquad M = M(t - r),

so each slice ``t = const`` carries ``\bar g = \delta + \phi\,dr^2`` with
``\phi = M/r``, lapse ``1/\sqrt{1+\phi}`` and shift covector ``-\phi\,dr``.
The surface ``\Sigma_d`` is the coordinate sphere ``s = 1`` of the shifted
spherical system ``y = d\hat z + s \tilde X``; with the axis along ``\hat z``
the polar coordinate on it is ``Z = \cos\theta`` and

.. math::

    r^2 = d^2 + 2 s d Z + s^2, \qquad
    \partial_s r = (dZ + s)/r, \qquad \partial_Z r = s d / r.

Everything below is evaluated pointwise from these closed forms; the only
numerical derivative is the tangential gradient of ``tr k / |H|`` in the
connection 1-form, which is taken spectrally.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .massaspect import mass_function
from .s2grid import LatitudeGrid, ScalarField, differentiate

__all__ = [
    "GeometryError",
    "SurfaceGeometry",
    "radius_u",
    "surface_geometry",
    "slice_metric",
    "slice_mean_curvature",
    "slice_extrinsic_curvature",
    "mean_curvature_norm",
    "connection_one_form",
    "area_ratio",
    "divergence_gas",
    "divergence_integral",
]


class GeometryError(ArithmeticError):
    """Raised when the surface leaves the regime where the data make sense."""


def radius_u(d, Z, s=1.0):
    """Areal radius ``r`` and retarded time ``u = d - r`` at a point of the sphere."""
    if not d > 2:
        raise ValueError(f"d must exceed 2, got {d}")
    if not 0 < s <= 2:
        raise ValueError(f"s must lie in (0, 2], got {s}")
    Z = np.asarray(Z, dtype=float)
    rad = d * d + 2.0 * s * d * Z + s * s
    if np.any(rad <= 0):
        raise GeometryError("nonpositive radicand in r^2")
    r = np.sqrt(rad)
    return r, d - r


@dataclass(frozen=True, eq=False)
class SurfaceGeometry:
    """Per-node geometric data of ``Sigma_d`` (all arrays indexed like the grid).

    Metric components are given both in ``(s, Z, phi)`` form (suffix ``Z``)
    and in ``(s, theta, phi)`` form (suffix ``theta``); ``Z_theta = -sin(theta)``.
    """

    d: float
    grid: LatitudeGrid = field(repr=False)
    label: str
    r: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    g_ss: np.ndarray = field(repr=False)
    g_sZ: np.ndarray = field(repr=False)
    g_ZZ: np.ndarray = field(repr=False)
    sigma_thth: np.ndarray = field(repr=False)
    sigma_phph: np.ndarray = field(repr=False)
    sigma_scalar: np.ndarray = field(repr=False)
    det_ratio: np.ndarray = field(repr=False)
    normal_lapse: np.ndarray = field(repr=False)
    hhat: np.ndarray = field(repr=False)
    divgas: np.ndarray = field(repr=False)
    lapse: np.ndarray = field(repr=False)
    k_rr: np.ndarray = field(repr=False)
    k_ss: np.ndarray = field(repr=False)
    k_sZ: np.ndarray = field(repr=False)
    k_ZZ: np.ndarray = field(repr=False)
    k_phph: np.ndarray = field(repr=False)
    trk: np.ndarray = field(repr=False)
    Hnorm: np.ndarray = field(repr=False)
    k_nu: np.ndarray = field(repr=False)
    alpha_Z: np.ndarray = field(repr=False)

    @property
    def Z(self):
        return self.grid.nodes

    @property
    def sin_theta(self):
        return self.grid.sin_theta

    @property
    def g_sth(self):
        return -self.sin_theta * self.g_sZ

    @property
    def alpha_th(self):
        return -self.sin_theta * self.alpha_Z

    @property
    def k_sth(self):
        return -self.sin_theta * self.k_sZ

    @property
    def k_thth(self):
        return self.sin_theta**2 * self.k_ZZ

    @property
    def areaRatio(self):
        return np.sqrt(self.det_ratio)

    @property
    def breve_h(self):
        """``hhat`` with the pure divergence ``-div(g_s.)`` removed."""
        return self.hhat + self.divgas

    def field(self, name):
        """Wrap one of the per-node arrays as a :class:`ScalarField`."""
        return ScalarField(self.grid, getattr(self, name))


def surface_geometry(p, d, grid):
    """Compute the full exact geometry of ``Sigma_d`` for profile ``p``."""
    if not d >= 10:
        raise ValueError(f"d must be >= 10, got {d}")
    Z = grid.nodes
    w = 1.0 - Z * Z
    r, u = radius_u(d, Z)
    m = mass_function(p, u)
    # d/dr of M(d - r) and its second derivative
    m1 = p.dF(r - d)
    phi = m / r
    phi_r = m1 / r - m / r**2
    onephi = 1.0 + phi
    if np.any(onephi <= 0):
        raise GeometryError("1 + M/r <= 0: slice metric degenerate (d too small)")

    c = (d * Z + 1.0) / r          # dr/ds
    e = d / r                      # dr/dZ
    dc = e * (1.0 - c / r)         # d^2 r / ds dZ
    de = -e * e / r                # d^2 r / dZ^2

    # slice metric in (s, Z, phi)
    g_ss = 1.0 + phi * c * c
    g_sZ = phi * c * e
    D = 1.0 + phi * e * e * w
    if np.any(D <= 0):
        raise GeometryError("degenerate induced metric")
    g_ZZ = D / w
    L2 = g_ss - g_sZ**2 / g_ZZ
    if np.any(L2 <= 0):
        raise GeometryError("degenerate slice metric: g_ss - sigma^ab g_as g_bs <= 0")
    L = np.sqrt(L2)

    # 1/2 sigma^ab d_s g_ab
    ds_gZZ = 2.0 / w + phi_r * c * e * e + 2.0 * phi * e * dc
    half_trace = 0.5 * (ds_gZZ / g_ZZ + 2.0)

    # div(g_s.) = D^{-1/2} d/dZ [ w phi c e D^{-1/2} ]
    dphi = phi_r * e
    T = w * phi * c * e
    dT = -2.0 * Z * phi * c * e + w * (dphi * c * e + phi * dc * e + phi * c * de)
    dD = dphi * e * e * w + 2.0 * phi * e * de * w - 2.0 * Z * phi * e * e
    sqD = np.sqrt(D)
    dQ = dT / sqD - 0.5 * T * dD / (D * sqD)
    divgas = dQ / sqD

    hhat = (half_trace - divgas) / L

    # extrinsic curvature of t = d: K = (K_rr - kappa) dr dr + kappa * flat
    sq = np.sqrt(onephi)
    lapse = 1.0 / sq
    dphi_dt = -m1 / r
    k_rr = 0.5 * sq * (dphi_dt + 2.0 * phi_r - phi * phi_r / onephi)
    kappa = phi / (r * sq)
    k_ss = (k_rr - kappa) * c * c + kappa
    k_sZ = (k_rr - kappa) * c * e
    k_ZZ = (k_rr - kappa) * e * e + kappa / w
    k_phph = kappa * w
    trk = k_ZZ / g_ZZ + k_phph / w

    H2 = hhat**2 - trk**2
    if np.any(H2 <= 0):
        raise GeometryError("mean curvature vector is not spacelike")
    Hnorm = np.sqrt(H2)

    # alpha_H = -k(nu, .) + grad(trk / |H|)
    shift_Z = g_sZ / g_ZZ
    k_nu = (k_sZ - shift_Z * k_ZZ) / L
    grad = differentiate(ScalarField(grid, trk / Hnorm)).values
    alpha_Z = -k_nu + grad

    return SurfaceGeometry(
        d=float(d), grid=grid, label=getattr(p, "label", "custom"),
        r=r, mass=m,
        g_ss=g_ss, g_sZ=g_sZ, g_ZZ=g_ZZ,
        sigma_thth=D, sigma_phph=w.copy(), sigma_scalar=phi * e * e,
        det_ratio=D, normal_lapse=L,
        hhat=hhat, divgas=divgas,
        lapse=lapse, k_rr=k_rr, k_ss=k_ss, k_sZ=k_sZ, k_ZZ=k_ZZ, k_phph=k_phph,
        trk=trk, Hnorm=Hnorm, k_nu=k_nu, alpha_Z=alpha_Z,
    )


def slice_metric(p, d, grid):
    return surface_geometry(p, d, grid)


def slice_mean_curvature(p, d, grid):
    return surface_geometry(p, d, grid).field("hhat")


def slice_extrinsic_curvature(p, d, grid):
    """``(components, trk)`` where components maps names to per-node arrays."""
    geom = surface_geometry(p, d, grid)
    comps = {"k_rr": geom.k_rr, "k_ss": geom.k_ss, "k_sth": geom.k_sth,
             "k_thth": geom.k_thth, "k_phph": geom.k_phph}
    return comps, geom.field("trk")


def mean_curvature_norm(geom):
    return geom.field("Hnorm")


def connection_one_form(geom):
    """theta-component of the connection 1-form (the phi-component is zero)."""
    return ScalarField(geom.grid, geom.alpha_th)


def area_ratio(geom):
    return ScalarField(geom.grid, geom.areaRatio)


def divergence_gas(geom):
    return geom.field("divgas")


def divergence_integral(geom):
    """``int_Sigma div(g_s.) dV_sigma``, which vanishes identically."""
    w = geom.grid.weights
    return 2.0 * math.pi * math.fsum(w * geom.divgas * geom.areaRatio)
