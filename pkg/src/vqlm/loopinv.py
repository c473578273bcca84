"""Loop invariant on the circles ``Z = c`` relative to a Schwarzschild reference.

The one-parameter family ``M_z = z M + (1 - z) m_ref`` joins Schwarzschild of
mass ``m_ref`` (``z = 0``) to the given Vaidya spacetime (``z = 1``).  Its
first variation on the unit spheres gives

* ``tr(delta sigma) / 2 = (F - m_ref)(1 - Z^2) / 2``
* ``delta h = -(F - m_ref)(1 - 2 Z^2) - F' Z (1 - Z^2) / 2``

and the invariant of the circle ``Z = c`` is the integral of their sum over
the cap ``Z >= c``, divided by ``8 pi``.
"""

from dataclasses import dataclass
import math

import numpy as np

from .s2grid import ScalarField, gauss_legendre

__all__ = ["LoopInvariantSample", "delta_data", "cap_integral", "invariant", "closed_invariant"]


@dataclass(frozen=True)
class LoopInvariantSample:
    c: float
    numeric: float
    closed: float
    signed_numeric: float
    signed_closed: float

    @property
    def error(self):
        return abs(self.numeric - self.closed)


def _delta(p, Z):
    Z = np.asarray(Z, dtype=float)
    dm = p.F(Z) - p.m_ref
    w = 1.0 - Z**2
    return dm * w / 2.0, -dm * (1.0 - 2.0 * Z**2) - 0.5 * p.dF(Z) * Z * w


def delta_data(p, grid):
    """``(dsigma_trace, dh)`` on the grid nodes."""
    a, b = _delta(p, grid.nodes)
    return ScalarField(grid, a), ScalarField(grid, b)


def cap_integral(p, lo, hi=1.0, n=128):
    """``(1/8 pi) int_{lo <= Z <= hi} (dsigma_trace + dh) dV``.

    Gauss-Legendre quadrature with ``n`` nodes mapped onto ``[lo, hi]``, so the
    cap boundary falls exactly on the integration limit.
    """
    if not -1.0 <= lo < hi <= 1.0:
        raise ValueError(f"need -1 <= lo < hi <= 1, got [{lo}, {hi}]")
    x, w = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    Z = lo + half * (x + 1.0)
    a, b = _delta(p, Z)
    # (1/8 pi) * 2 pi * int dZ
    return 0.25 * half * math.fsum(w * (a + b))


def closed_invariant(p, c):
    """Signed boundary value ``c (1 - c^2)(F(c) - m_ref) / 8``."""
    return 0.125 * c * (1.0 - c * c) * (float(p.F(c)) - p.m_ref)


def invariant(p, c, n=128):
    """Numeric and closed-form loop invariant for the circle ``Z = c``."""
    if not -0.99 < c < 0.99:
        raise ValueError(f"c must lie in (-0.99, 0.99), got {c}")
    signed = cap_integral(p, c, 1.0, n)
    closed = closed_invariant(p, c)
    return LoopInvariantSample(float(c), abs(signed), abs(closed), signed, closed)
