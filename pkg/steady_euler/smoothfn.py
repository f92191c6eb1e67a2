"""
Smooth one-dimensional profiles with compact (or explicitly unbounded) support.

Every profile is evaluated through `profile(z, k)`, the k-th derivative at z.
Outside the support all provided derivatives are exactly 0.0. The canonical
shapes are built from e(t) = exp(-1/t), whose tails are flat to every order.
"""

import math
import warnings

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate as sp_integrate
from scipy.special import expit

from steady_euler.errors import ConfigurationError, InvalidIntervalError, QuadratureError

DEFAULT_REL_TOL = 1e-10
DEFAULT_MAX_SUBINTERVALS = 200


class SmoothProfile(object):
    """A scalar profile with analytically provided derivatives.

    :param evaluator: callable (z: ndarray inside the support, k: int) -> ndarray
    :param support: (z_lo, z_hi) or None for the entire line
    :param class_order: guaranteed order of continuous differentiability
    :param max_order: highest derivative the evaluator provides
    :param outside: (value below support, value above support) for k == 0
    """

    def __init__(self, evaluator, support=None, class_order=3, max_order=3, outside=(0.0, 0.0),
                 name="profile"):
        if support is not None and not support[0] <= support[1]:
            raise InvalidIntervalError(support[0], support[1])
        self._evaluator = evaluator
        self.support = None if support is None else (float(support[0]), float(support[1]))
        self.class_order = class_order
        self.max_order = max_order
        self.outside = (float(outside[0]), float(outside[1]))
        self.name = name

    @property
    def is_constant(self):
        return False

    @property
    def bounded(self):
        return self.support is not None

    def __call__(self, z, k=0):
        if not 0 <= k <= self.max_order:
            raise ValueError("%s provides derivatives up to order %d, asked for %d" % (self.name, self.max_order, k))
        z = np.asarray(z, dtype=float)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if self.support is None:
            out = np.asarray(self._evaluator(z, k), dtype=float)
        else:
            lo, hi = self.support
            out = np.zeros_like(z)
            if k == 0:
                out[z <= lo] = self.outside[0]
                out[z >= hi] = self.outside[1]
            inside = (z > lo) & (z < hi)
            if np.any(inside):
                out[inside] = self._evaluator(z[inside], k)
        return float(out[0]) if scalar else out

    def __repr__(self):
        return "<%s support=%s class_order=%d>" % (self.name, self.support, self.class_order)


class ConstantProfile(SmoothProfile):
    def __init__(self, value):
        self.value = float(value)
        super().__init__(self._evaluate, support=None, class_order=10 ** 6, name="constant(%g)" % value)

    def _evaluate(self, z, k):
        return np.full_like(z, self.value if k == 0 else 0.0)

    @property
    def is_constant(self):
        return True


def constant(value):
    return ConstantProfile(value)


def zero():
    return ConstantProfile(0.0)


def _check_interval(z0, z1):
    if not (np.isfinite(z0) and np.isfinite(z1) and z0 < z1):
        raise InvalidIntervalError(z0, z1)


def _unit_smoothstep(t, k):
    """k-th t-derivative of e(t)/(e(t)+e(1-t)) for t strictly inside (0, 1).

    Written as q = expit(-g) with g = 1/t - 1/(1-t), so that q' = -w g' with w = q(1-q).
    """
    with np.errstate(all='ignore'):
        g = 1.0 / t - 1.0 / (1.0 - t)
        q = expit(-g)
        if k == 0:
            return q
        w = q * (1.0 - q)
        g1 = -1.0 / t ** 2 - 1.0 / (1.0 - t) ** 2
        q1 = -w * g1
        if k == 1:
            return np.where(w > 0.0, q1, 0.0)
        g2 = 2.0 / t ** 3 - 2.0 / (1.0 - t) ** 3
        q2 = -q1 * (1.0 - 2.0 * q) * g1 - w * g2
        if k == 2:
            return np.where(w > 0.0, q2, 0.0)
        g3 = -6.0 / t ** 4 - 6.0 / (1.0 - t) ** 4
        q3 = -(q2 * (1.0 - 2.0 * q) - 2.0 * q1 ** 2) * g1 - 2.0 * q1 * (1.0 - 2.0 * q) * g2 - w * g3
        return np.where(w > 0.0, q3, 0.0)


def smoothstep(z0, z1):
    """0 for z <= z0, 1 for z >= z1, strictly increasing in between."""
    _check_interval(z0, z1)
    width = float(z1 - z0)

    def evaluate(z, k):
        return _unit_smoothstep((z - z0) / width, k) / width ** k

    return SmoothProfile(evaluate, support=(z0, z1), outside=(0.0, 1.0), name="smoothstep(%g,%g)" % (z0, z1))


def bump(z0, z1, amplitude=1.0):
    """amplitude * exp(1 - 1/(1 - t^2)), t = (2z - z0 - z1)/(z1 - z0), positive exactly on (z0, z1)."""
    _check_interval(z0, z1)
    c = 2.0 / (z1 - z0)
    amplitude = float(amplitude)

    def evaluate(z, k):
        t = (2.0 * z - z0 - z1) / (z1 - z0)
        u = 1.0 - t * t
        with np.errstate(all='ignore'):
            value = amplitude * np.exp(1.0 - 1.0 / u)
            if k == 0:
                return np.where(u > 0.0, value, 0.0)
            h1 = -2.0 * t / u ** 2
            if k == 1:
                d = h1
            else:
                h2 = -2.0 / u ** 2 - 8.0 * t * t / u ** 3
                if k == 2:
                    d = h1 ** 2 + h2
                else:
                    h3 = -24.0 * t / u ** 3 - 48.0 * t ** 3 / u ** 4
                    d = h1 ** 3 + 3.0 * h1 * h2 + h3
            return np.where((value != 0.0) & (u > 0.0), value * d * c ** k, 0.0)

    return SmoothProfile(evaluate, support=(z0, z1), name="bump(%g,%g,%g)" % (z0, z1, amplitude))


def ramp(v_lo, v_hi, z0, z1):
    """v_lo + (v_hi - v_lo) * smoothstep(z0, z1); plateau values are returned exactly."""
    _check_interval(z0, z1)
    if v_lo == v_hi:
        return constant(v_lo)
    step = smoothstep(z0, z1)
    jump = float(v_hi - v_lo)

    def evaluate(z, k):
        if k == 0:
            return v_lo + jump * step(z, 0)
        return jump * step(z, k)

    profile = SmoothProfile(evaluate, support=(z0, z1), outside=(v_lo, v_hi),
                            name="ramp(%g->%g on %g,%g)" % (v_lo, v_hi, z0, z1))
    profile.endpoints = (float(v_lo), float(v_hi))
    return profile


def polynomial(coefficients):
    """Polynomial with coefficients in increasing degree; entire-line support."""
    poly = Polynomial(coefficients).trim()
    if poly.degree() == 0:
        return constant(poly.coef[0])
    derivatives = [poly] + [poly.deriv(m) for m in range(1, 4)]

    def evaluate(z, k):
        return derivatives[k](z)

    return SmoothProfile(evaluate, support=None, class_order=10 ** 6, name="polynomial%s" % (tuple(coefficients),))


def indicator(z0, z1, value=1.0):
    """Piecewise-constant test profile: `value` on [z0, z1], 0 elsewhere (class order 0)."""
    _check_interval(z0, z1)

    def evaluate(z, k):
        return np.full_like(z, value if k == 0 else 0.0)

    # closed interval: evaluate the endpoints as inside
    return SmoothProfile(evaluate, support=(np.nextafter(z0, -np.inf), np.nextafter(z1, np.inf)),
                         class_order=0, max_order=0, name="indicator(%g,%g)" % (z0, z1))


def integrate(f, a, b, rel_tol=DEFAULT_REL_TOL, points=None, abs_tol=0.0,
              max_subintervals=DEFAULT_MAX_SUBINTERVALS):
    """Adaptive Gauss-Kronrod quadrature of f over [a, b].

    Infinite limits are clipped to the support of `f` (a SmoothProfile, or any
    callable with a `support` attribute). Raises QuadratureError when the
    requested relative tolerance (or the optional absolute floor) is not met.
    """
    if rel_tol <= 0:
        raise ConfigurationError("rel_tol must be positive, got %r" % rel_tol)
    if a > b:
        raise InvalidIntervalError(a, b)
    support = getattr(f, "support", None)
    if not (np.isfinite(a) and np.isfinite(b)):
        if support is None or tuple(getattr(f, "outside", (0.0, 0.0))) != (0.0, 0.0):
            raise ConfigurationError("infinite integration limit needs an integrand with bounded support")
        a = max(a, support[0])
        b = min(b, support[1])
        if a >= b:
            return 0.0
    if a == b:
        return 0.0

    breaks = set(points or ())
    if support is not None:
        breaks.update(support)
    breaks = sorted(p for p in breaks if a < p < b)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sp_integrate.IntegrationWarning)
        result = sp_integrate.quad(
            f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=max_subintervals,
            points=breaks or None, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > max(rel_tol * abs(value), abs_tol):
        raise QuadratureError("adaptive quadrature on [%g, %g] did not converge" % (a, b), value, abserr)
    return value


def composite_simpson(f, a, b, n):
    """Reference composite Simpson rule on n (even) subintervals, vectorized."""
    if n % 2:
        n += 1
    z = np.linspace(a, b, n + 1)
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(math.fsum(weights * np.asarray(f(z))) * (b - a) / (3.0 * n))
