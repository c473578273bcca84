"""Axisymmetric calculus on the unit sphere.

Functions of ``Z = cos(theta)`` only are sampled on Gauss-Legendre nodes in
``(-1, 1)``. Integration over the sphere reduces to ``2*pi * int_{-1}^{1} f dZ``
and derivatives are taken in the Legendre coefficient domain, so every
operation here is exact (to rounding) on polynomials of low enough degree.

Sign note: for a function ``f`` of a single variable,
``int_{S^2} f'(Z) dV = 2*pi*(f(1) - f(-1))``.  This module always uses that
orientation.
"""

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np
from numpy.polynomial import legendre as npleg

__all__ = [
    "DEFAULT_N",
    "LatitudeGrid",
    "ScalarField",
    "LegendreSpectrum",
    "build_grid",
    "integrate_s2",
    "differentiate",
    "laplacian_axisym",
    "to_spectrum",
    "from_spectrum",
    "endpoint_values",
]

DEFAULT_N = 128
MIN_N = 8


_LD = np.longdouble


def _legendre_and_derivative(n, x):
    """P_n(x) and P_n'(x) by the three-term recurrence."""
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    # p1 = P_n, p0 = P_{n-1}
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def _legendre_table(n, x):
    """``P[l, k] = P_l(x_k)`` for ``l < n``, in the dtype of ``x``."""
    P = np.empty((n, x.size), dtype=x.dtype)
    P[0] = 1
    if n > 1:
        P[1] = x
    for l in range(2, n):
        P[l] = ((2 * l - 1) * x * P[l - 1] - (l - 1) * P[l - 2]) / l
    return P


def gauss_legendre(n, tol=1e-15, maxiter=100, dtype=float):
    """Gauss-Legendre nodes (ascending) and weights on [-1, 1].

    Newton iteration on the Legendre recurrence, started from the
    Tricomi approximation of the roots. Works for any ``n >= 1``;
    :func:`build_grid` adds the size restriction used by the library.
    Pass ``dtype=np.longdouble`` for extended-precision nodes.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    k = np.arange(1, n + 1)
    theta = np.pi * (4 * k - 1) / (4 * n + 2)
    x = (np.cos(theta) * (1 - (n - 1) / (8.0 * n**3))).astype(dtype)
    tol = max(tol, 4 * float(np.finfo(dtype).eps))
    for _ in range(maxiter):
        p, dp = _legendre_and_derivative(n, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= tol:
            break
    # one more step once converged, to land on the rounding floor
    p, dp = _legendre_and_derivative(n, x)
    x = x - p / dp
    p, dp = _legendre_and_derivative(n, x)
    w = 2 / ((1 - x * x) * dp * dp)
    order = np.argsort(x)
    return x[order], w[order]


@dataclass(frozen=True, eq=False)
class LatitudeGrid:
    """Gauss-Legendre nodes in Z with their quadrature weights.

    Legendre transforms run in extended precision: the analysis matrix is
    the quadrature projection refined into the exact inverse of the
    synthesis matrix at the (double precision) nodes, so
    ``from_spectrum(to_spectrum(f))`` reproduces ``f`` to rounding and
    spectral derivatives do not amplify transform error.
    """

    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @cached_property
    def _synthesis_ld(self):
        S = _legendre_table(self.n, self.nodes.astype(_LD)).T.copy()
        S.setflags(write=False)
        return S

    @cached_property
    def _analysis_ld(self):
        x, w = gauss_legendre(self.n, dtype=_LD)
        S = self._synthesis_ld
        l = np.arange(self.n)
        A = ((2 * l[:, None] + 1) / _LD(2)) * S.T * w[None, :]
        eye = np.eye(self.n, dtype=_LD)
        for _ in range(2):
            A = A + A @ (eye - S @ A)
        A.setflags(write=False)
        return A

    @cached_property
    def legendre_matrix(self):
        """``P[l, k] = P_l(Z_k)`` for ``l = 0..n-1``."""
        P = self._synthesis_ld.T.astype(float)
        P.setflags(write=False)
        return P

    @cached_property
    def analysis_matrix(self):
        """Maps node values to Legendre coefficients (double precision copy)."""
        A = self._analysis_ld.astype(float)
        A.setflags(write=False)
        return A

    def _analyse(self, values):
        return self._analysis_ld @ np.asarray(values, dtype=_LD)

    def _synthesise(self, coeffs):
        return (self._synthesis_ld @ np.asarray(coeffs, dtype=_LD)).astype(float)

    @property
    def sin_theta(self):
        return np.sqrt(1.0 - self.nodes**2)

    def sample(self, func):
        """Evaluate a vectorised ``func(Z)`` on the nodes."""
        return ScalarField(self, np.asarray(func(self.nodes), dtype=float) * np.ones(self.n))

    def constant(self, value):
        return ScalarField(self, np.full(self.n, float(value)))


def build_grid(n=DEFAULT_N):
    """Build the latitude grid with ``n`` Gauss-Legendre nodes (``n >= 8``)."""
    if int(n) != n or n < MIN_N:
        raise ValueError(f"grid size must be an integer >= {MIN_N}, got {n!r}")
    nodes, weights = gauss_legendre(int(n), dtype=_LD)
    return LatitudeGrid(int(n), nodes.astype(float), weights.astype(float))


class ScalarField:
    """Axisymmetric function sampled on the nodes of a :class:`LatitudeGrid`.

    Supports elementwise arithmetic with other fields on the same grid and
    with scalars; ``np.asarray(field)`` gives the node values.
    """

    __slots__ = ("grid", "values")
    __array_priority__ = 100

    def __init__(self, grid, values):
        values = np.array(values, dtype=float)
        if values.shape != (grid.n,):
            raise ValueError(
                f"expected {grid.n} values, got array of shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("scalar field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("ScalarField is immutable")

    def __repr__(self):
        return f"ScalarField(n={self.grid.n})"

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)

    def __len__(self):
        return self.grid.n

    def _other(self, other):
        if isinstance(other, ScalarField):
            if other.grid is not self.grid and other.grid.n != self.grid.n:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def _wrap(self, values):
        return ScalarField(self.grid, values)

    def __add__(self, other):
        return self._wrap(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.values - self._other(other))

    def __rsub__(self, other):
        return self._wrap(self._other(other) - self.values)

    def __mul__(self, other):
        return self._wrap(self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._wrap(self.values / self._other(other))

    def __rtruediv__(self, other):
        return self._wrap(self._other(other) / self.values)

    def __neg__(self):
        return self._wrap(-self.values)

    def __pow__(self, k):
        return self._wrap(self.values**k)

    def sup(self):
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class LegendreSpectrum:
    """Coefficients ``c_l`` of ``f = sum_l c_l P_l(Z)``."""

    grid: LatitudeGrid = field(repr=False)
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients.setflags(write=False)

    def __getitem__(self, l):
        return self.coefficients[l]


def _values(f):
    return f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=float)


def integrate_s2(f):
    """Integral of an axisymmetric field over the unit sphere.

    Returns ``2*pi * sum_k w_k f_k``; the sum runs in ascending node order
    with compensated summation, so results are bit-reproducible.
    """
    w = f.grid.weights
    return 2.0 * math.pi * math.fsum(w * f.values)


def to_spectrum(f):
    """Legendre coefficients ``c_l = (2l+1)/2 * sum_k w_k f_k P_l(Z_k)``."""
    return LegendreSpectrum(f.grid, f.grid._analyse(f.values).astype(float))


def from_spectrum(s):
    return ScalarField(s.grid, s.grid._synthesise(s.coefficients))


def endpoint_values(f):
    """``(f(-1), f(1))`` from the Legendre series, using ``P_l(+-1) = (+-1)^l``."""
    c = f.grid._analyse(f.values)
    signs = np.where(np.arange(c.size) % 2 == 0, 1, -1).astype(_LD)
    return float(np.sum(c * signs)), float(np.sum(c))


def _legder(c):
    """Derivative of a Legendre series, same length (dtype preserved)."""
    n = c.size
    out = np.zeros_like(c)
    # c'_{l} = (2l+1) * sum_{j > l, j - l odd} c_j, built from the top down
    acc_odd = c.dtype.type(0)
    acc_even = c.dtype.type(0)
    for j in range(n - 1, 0, -1):
        if j % 2:
            acc_odd += c[j]
            out[j - 1] = (2 * (j - 1) + 1) * acc_odd
        else:
            acc_even += c[j]
            out[j - 1] = (2 * (j - 1) + 1) * acc_even
    return out


def differentiate(f):
    """``df/dZ`` by differentiating the Legendre series."""
    c = f.grid._analyse(f.values)
    return ScalarField(f.grid, f.grid._synthesise(_legder(c)))


def laplacian_axisym(f):
    """Axisymmetric Laplace-Beltrami operator ``d/dZ[(1-Z^2) df/dZ]``.

    Applied mode by mode as ``-l(l+1)`` on the Legendre coefficients.
    """
    c = f.grid._analyse(f.values)
    l = np.arange(c.size, dtype=_LD)
    return ScalarField(f.grid, f.grid._synthesise(-l * (l + 1) * c))


def gradient_norm_sq(f):
    """``|grad f|^2 = (1-Z^2) (df/dZ)^2`` on the unit sphere."""
    df = differentiate(f).values
    return ScalarField(f.grid, (1.0 - f.grid.nodes**2) * df * df)


def legendre_polynomial(grid, l):
    """``P_l`` sampled on the grid (``l < n`` uses the cached table)."""
    if l < grid.n:
        return ScalarField(grid, grid.legendre_matrix[l])
    c = np.zeros(l + 1)
    c[l] = 1.0
    return ScalarField(grid, npleg.legval(grid.nodes, c))
