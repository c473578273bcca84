"""Extraction of ``1/d`` expansion coefficients from samples at several ``d``."""

from dataclasses import dataclass

import numpy as np

from .s2grid import ScalarField

__all__ = ["ExpansionTriple", "richardson_fit", "DEFAULT_SCHEDULE"]

DEFAULT_SCHEDULE = (250.0, 500.0, 1000.0, 2000.0)


@dataclass(frozen=True, eq=False)
class ExpansionTriple:
    """Coefficients of ``v(d) = a0 + a1/d + a2/d^2 + O(d^-3)`` per node."""

    a0: ScalarField
    a1: ScalarField
    a2: ScalarField
    residual: np.ndarray
    a3: np.ndarray

    def evaluate(self, d):
        """Fitted three-term series at distance ``d``."""
        a0, a1, a2 = (np.asarray(getattr(a, "values", a)) for a in (self.a0, self.a1, self.a2))
        return a0 + a1 / d + a2 / d**2


def richardson_fit(samples, order=2):
    """Fit ``a0 + a1/d + a2/d^2`` (plus a ``1/d^3`` nuisance term) per node.

    ``samples`` is a sequence of ``(d, field)`` pairs on a common grid; ``field``
    may be a :class:`ScalarField` or a plain array, and all fields must share
    a grid. With four or more samples the cubic term is fitted and discarded;
    its size at the smallest ``d`` is reported as ``residual`` together with
    any least-squares misfit.
    """
    if order != 2:
        raise ValueError("only order=2 extraction is supported")
    samples = list(samples)
    if len(samples) < 3:
        raise ValueError(f"need at least 3 samples, got {len(samples)}")
    ds = np.array([float(d) for d, _ in samples])
    if np.any(ds <= 0):
        raise ValueError("distances must be positive")
    if len(np.unique(ds)) != len(ds):
        raise np.linalg.LinAlgError("duplicated d values make the fit rank deficient")
    grid = None
    rows = []
    for _, f in samples:
        if isinstance(f, ScalarField):
            grid = f.grid if grid is None else grid
            rows.append(f.values)
        else:
            rows.append(np.asarray(f, dtype=float))
    V = np.vstack(rows)

    nterms = 4 if len(ds) >= 4 else 3
    dmin = ds.min()
    x = dmin / ds                     # scaled 1/d, in (0, 1]
    A = np.vander(x, nterms, increasing=True)
    coef, *_ = np.linalg.lstsq(A, V, rcond=None)
    if np.linalg.matrix_rank(A) < nterms:
        raise np.linalg.LinAlgError("rank-deficient design matrix")
    misfit = np.max(np.abs(A @ coef - V), axis=0)
    scale = dmin ** np.arange(nterms)
    coef = coef * scale[:, None]
    a3 = coef[3] if nterms == 4 else np.zeros(V.shape[1])
    residual = np.abs(a3) / dmin**3 + misfit

    def wrap(v):
        return ScalarField(grid, v) if grid is not None else v

    return ExpansionTriple(wrap(coef[0]), wrap(coef[1]), wrap(coef[2]), residual, a3)
