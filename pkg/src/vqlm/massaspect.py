"""Mass-aspect profiles.

A profile is the limit function ``F`` with its first three derivatives and
an antiderivative ``G`` (``G' = F``, ``G(0) = 0``).  At finite distance the
mass function of the Vaidya metric is taken to be ``M(u) = F(-u)``.

Profiles are written on the command line as ``name:key=value,...``::

    minkowski
    constant:m0=2
    affine:m0=1,a=0.5
    tanh_step:m0=1,a=0.5,lambda=2
    bump:m0=1,a=0.5,lambda=2

Every profile also accepts ``m_ref`` (reference Schwarzschild mass used by
the loop invariant); it defaults to ``max(m0, 0)``.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np
from scipy import integrate, special

__all__ = [
    "MassAspectProfile",
    "preset",
    "parse_profile",
    "mass_function",
    "mass_function_derivative",
    "dec_satisfied",
    "minkowski",
    "constant",
    "affine",
    "tanh_step",
    "bump",
]

Func = Callable[[np.ndarray], np.ndarray]

PRESET_KEYS = {
    "minkowski": (),
    "constant": ("m0",),
    "affine": ("m0", "a"),
    "tanh_step": ("m0", "a", "lambda"),
    "bump": ("m0", "a", "lambda"),
}


@dataclass(frozen=True)
class MassAspectProfile:
    """Limit profile ``F`` with derivatives ``dF, d2F, d3F`` and ``G``.

    All callables accept scalars or arrays and are defined on the whole
    real line.
    """

    F: Func = field(repr=False)
    dF: Func = field(repr=False)
    d2F: Func = field(repr=False)
    d3F: Func = field(repr=False)
    G: Func = field(repr=False)
    m_ref: float = 0.0
    label: str = "custom"
    params: tuple = ()

    def __post_init__(self):
        if not math.isfinite(self.m_ref) or self.m_ref < 0:
            raise ValueError(f"m_ref must be finite and >= 0, got {self.m_ref}")

    @property
    def spec(self):
        """Textual form accepted by :func:`parse_profile`."""
        if not self.params:
            return self.label
        body = ",".join(f"{k}={_fmt(v)}" for k, v in self.params)
        return f"{self.label}:{body}"

    def with_m_ref(self, m_ref):
        params = tuple((k, v) for k, v in self.params if k != "m_ref")
        params += (("m_ref", float(m_ref)),)
        return MassAspectProfile(self.F, self.dF, self.d2F, self.d3F, self.G,
                                 float(m_ref), self.label, params)

    @classmethod
    def from_sympy(cls, expr, symbol, m_ref=0.0, label="custom"):
        """Build a profile from a sympy expression in one variable.

        ``G`` comes from symbolic integration when sympy finds a closed form
        and from adaptive quadrature otherwise.
        """
        import sympy as sp

        fns = [sp.lambdify(symbol, sp.diff(expr, symbol, k), modules="numpy")
               for k in range(4)]
        fns = [_broadcasting(f) for f in fns]
        anti = sp.integrate(expr, symbol)
        G = None
        if not anti.has(sp.Integral):
            anti = anti - anti.subs(symbol, 0)
            try:
                G = _broadcasting(sp.lambdify(symbol, anti, modules=["scipy", "numpy"]))
                G(np.array([0.5]))
            except Exception:
                # antiderivative uses functions without a numeric backend
                G = None
        if G is None:
            G = _quad_antiderivative(fns[0])
        return cls(*fns, G=G, m_ref=float(m_ref), label=label)


def _fmt(v):
    # shortest round-trip form, without a trailing ".0"
    text = repr(float(v))
    return text[:-2] if text.endswith(".0") else text


def _broadcasting(f):
    def g(x):
        x = np.asarray(x, dtype=float)
        return np.asarray(f(x), dtype=float) + np.zeros_like(x)
    return g


def _quad_antiderivative(f):
    def G(x):
        x = np.asarray(x, dtype=float)
        flat = [integrate.quad(lambda t: float(f(t)), 0.0, xi,
                               epsabs=1e-14, epsrel=1e-13, limit=200)[0]
                for xi in x.ravel()]
        return np.array(flat).reshape(x.shape)
    return G


def _check(**params):
    for k, v in params.items():
        if not math.isfinite(v):
            raise ValueError(f"profile parameter {k} must be finite, got {v}")


def minkowski():
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return MassAspectProfile(zero, zero, zero, zero, zero, 0.0, "minkowski")


def constant(m0, m_ref=None):
    _check(m0=m0)
    m0 = float(m0)
    m_ref = _default_mref(m0, m_ref)
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return MassAspectProfile(
        F=lambda x: np.full_like(np.asarray(x, dtype=float), m0),
        dF=zero, d2F=zero, d3F=zero,
        G=lambda x: m0 * np.asarray(x, dtype=float),
        m_ref=m_ref, label="constant",
        params=(("m0", m0),) + _mref_param(m_ref, m0))


def affine(m0, a, m_ref=None):
    _check(m0=m0, a=a)
    m0, a = float(m0), float(a)
    m_ref = _default_mref(m0, m_ref)
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return MassAspectProfile(
        F=lambda x: m0 + a * np.asarray(x, dtype=float),
        dF=lambda x: np.full_like(np.asarray(x, dtype=float), a),
        d2F=zero, d3F=zero,
        G=lambda x: m0 * np.asarray(x, dtype=float) + 0.5 * a * np.asarray(x, dtype=float) ** 2,
        m_ref=m_ref, label="affine",
        params=(("m0", m0), ("a", a)) + _mref_param(m_ref, m0))


def _log_cosh(y):
    y = np.abs(y)
    return y + np.log1p(np.exp(-2.0 * y)) - math.log(2.0)


def tanh_step(m0, a, lam, m_ref=None):
    """``F(x) = m0 + a tanh(lam x)``."""
    _check(m0=m0, a=a, lam=lam)
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    m0, a, lam = float(m0), float(a), float(lam)
    m_ref = _default_mref(m0, m_ref)

    def sech2(x):
        return 1.0 / np.cosh(lam * np.asarray(x, dtype=float)) ** 2

    def th(x):
        return np.tanh(lam * np.asarray(x, dtype=float))

    return MassAspectProfile(
        F=lambda x: m0 + a * th(x),
        dF=lambda x: a * lam * sech2(x),
        d2F=lambda x: -2.0 * a * lam**2 * sech2(x) * th(x),
        d3F=lambda x: -2.0 * a * lam**3 * sech2(x) * (sech2(x) - 2.0 * th(x) ** 2),
        G=lambda x: m0 * np.asarray(x, dtype=float) + a / lam * _log_cosh(lam * np.asarray(x, dtype=float)),
        m_ref=m_ref, label="tanh_step",
        params=(("m0", m0), ("a", a), ("lambda", lam)) + _mref_param(m_ref, m0))


def bump(m0, a, lam, m_ref=None):
    """``F(x) = m0 + a exp(-lam x^2)``."""
    _check(m0=m0, a=a, lam=lam)
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    m0, a, lam = float(m0), float(a), float(lam)
    m_ref = _default_mref(m0, m_ref)

    def e(x):
        return np.exp(-lam * np.asarray(x, dtype=float) ** 2)

    def x_(x):
        return np.asarray(x, dtype=float)

    return MassAspectProfile(
        F=lambda x: m0 + a * e(x),
        dF=lambda x: -2.0 * a * lam * x_(x) * e(x),
        d2F=lambda x: a * e(x) * (4.0 * lam**2 * x_(x) ** 2 - 2.0 * lam),
        d3F=lambda x: a * e(x) * (12.0 * lam**2 * x_(x) - 8.0 * lam**3 * x_(x) ** 3),
        G=lambda x: m0 * x_(x) + 0.5 * a * math.sqrt(math.pi / lam) * special.erf(math.sqrt(lam) * x_(x)),
        m_ref=m_ref, label="bump",
        params=(("m0", m0), ("a", a), ("lambda", lam)) + _mref_param(m_ref, m0))


def _default_mref(m0, m_ref):
    # the reference Schwarzschild mass cannot be negative
    return max(m0, 0.0) if m_ref is None else float(m_ref)


def _mref_param(m_ref, m0):
    return () if m_ref == _default_mref(m0, None) else (("m_ref", m_ref),)


_FACTORIES = {
    "minkowski": lambda kw: minkowski() if not kw else _minkowski_ref(kw),
    "constant": lambda kw: constant(kw["m0"], kw.get("m_ref")),
    "affine": lambda kw: affine(kw["m0"], kw["a"], kw.get("m_ref")),
    "tanh_step": lambda kw: tanh_step(kw["m0"], kw["a"], kw["lambda"], kw.get("m_ref")),
    "bump": lambda kw: bump(kw["m0"], kw["a"], kw["lambda"], kw.get("m_ref")),
}


def _minkowski_ref(kw):
    return minkowski().with_m_ref(kw["m_ref"])


def preset(name, **params):
    """Construct a named preset profile.

    ``name`` is one of ``minkowski, constant, affine, tanh_step, bump``;
    parameters use the same keys as the textual form (``lambda`` may also be
    passed as ``lam``).
    """
    if "lam" in params:
        params["lambda"] = params.pop("lam")
    if name not in PRESET_KEYS:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PRESET_KEYS)}")
    allowed = set(PRESET_KEYS[name]) | {"m_ref"}
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)} for profile {name!r}")
    missing = [k for k in PRESET_KEYS[name] if k not in params]
    if missing:
        raise ValueError(f"missing parameter(s) {missing} for profile {name!r}")
    kw = {k: float(v) for k, v in params.items()}
    return _FACTORIES[name](kw)


def parse_profile(text):
    """Parse ``name:key=value,key=value`` into a profile."""
    text = text.strip()
    name, _, body = text.partition(":")
    params = {}
    if body:
        for item in body.split(","):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ValueError(f"malformed profile parameter {item!r} in {text!r}")
            if key in params:
                raise ValueError(f"duplicate parameter {key!r} in {text!r}")
            try:
                params[key] = float(value)
            except ValueError:
                raise ValueError(f"parameter {key!r} is not a number: {value!r}") from None
    elif text.endswith(":"):
        raise ValueError(f"empty parameter list in {text!r}")
    return preset(name.strip(), **params)


def mass_function(p, u):
    """Finite-distance mass function ``M(u) = F(-u)``."""
    return p.F(-np.asarray(u, dtype=float))


def mass_function_derivative(p, u):
    """``dM/du = -F'(-u)``."""
    return -p.dF(-np.asarray(u, dtype=float))


def dec_satisfied(p, samples=512, lo=-1.5, hi=1.5):
    """Dominant energy condition: ``M`` non-increasing, i.e. ``F' >= 0``."""
    x = np.linspace(lo, hi, samples)
    return bool(np.all(p.dF(x) >= -1e-12))
