"""
Lift an incompressible seed (U, P) to a steady compressible state

    rho = rho_t(P),    s = s_t(P),    u = Psi(P) U,

where the ramps rho_t, s_t are flat outside [b, p_inf] and Psi is tied to them by

    d/dz pi(rho_t(z), s_t(z)) = rho_t(z) Psi(z)^2.

Either the ramps are chosen first and Psi follows in closed form
(`psi_from_ramps`), or Psi is chosen first and rho_t is obtained by
integrating the relation above as an ODE (`rho_from_psi`, `shoot_rho0`).
"""

from collections import namedtuple
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from steady_euler import logger
from steady_euler import smoothfn
from steady_euler.errors import (AccuracyError, ConfigurationError, ConstructionError,
                                 ShootingError, VacuumError)

DEFAULT_ODE_STEP = 1e-4
DEFAULT_ODE_TOL = 1e-8
DEFAULT_SHOOT_TOL = 1e-10

SHOOT_BRACKET = (1e-6, 1e6)
WIDENED_BRACKET = (1e-12, 1e12)
SHOOT_SCAN = 49

SOLV_SAMPLES = 1000


@dataclass(frozen=True)
class RampPair(object):
    rho_tilde: smoothfn.SmoothProfile
    s_tilde: smoothfn.SmoothProfile
    b: float
    p_inf: float
    rho_0: float
    rho_inf: float
    s_0: float
    s_inf: float

    @property
    def endpoints(self):
        return (self.rho_0, self.rho_inf, self.s_0, self.s_inf)


def make_ramps(b, p_inf, rho_0, rho_inf, s_0, s_inf):
    """Canonical smoothstep ramps rising on [b, p_inf]."""
    for name, value in (("rho_0", rho_0), ("rho_inf", rho_inf)):
        if not (np.isfinite(value) and value > 0.0):
            raise ConfigurationError("ramps.%s must be > 0, got %r" % (name, value))
    for name, value in (("s_0", s_0), ("s_inf", s_inf), ("b", b), ("p_inf", p_inf)):
        if not np.isfinite(value):
            raise ConfigurationError("ramps.%s must be finite, got %r" % (name, value))
    if b > p_inf:
        raise ConfigurationError("ramps.b=%r must not exceed p_inf=%r" % (b, p_inf))
    if rho_0 > rho_inf:
        raise ConfigurationError("ramps.rho_0=%r must not exceed rho_inf=%r" % (rho_0, rho_inf))
    if s_0 > s_inf:
        raise ConfigurationError("ramps.s_0=%r must not exceed s_inf=%r" % (s_0, s_inf))

    if b == p_inf:
        if (rho_0, s_0) != (rho_inf, s_inf):
            logger.warn("ramp interval [b, p_inf] is empty: using the constant far-field state")
        rho_0, s_0 = rho_inf, s_inf
        return RampPair(smoothfn.constant(rho_inf), smoothfn.constant(s_inf), float(b), float(p_inf),
                        float(rho_0), float(rho_inf), float(s_0), float(s_inf))

    return RampPair(smoothfn.ramp(rho_0, rho_inf, b, p_inf), smoothfn.ramp(s_0, s_inf, b, p_inf),
                    float(b), float(p_inf), float(rho_0), float(rho_inf), float(s_0), float(s_inf))


def isentropic_ramps(b, p_inf, rho_0, rho_inf, s_inf):
    """Ramps with a flat entropy s_t = s_inf; the lift is then divergence free."""
    return make_ramps(b, p_inf, rho_0, rho_inf, s_inf, s_inf)


# ================================================================
# Profile first: Psi from the ramps
# ================================================================

def psi_from_ramps(ramps, eos):
    """Psi = sqrt(G), G = e^(a s) rho^(gamma-2) (gamma rho' + a rho s'), supported on [b, p_inf].

    Psi' = G' / (2 Psi) where Psi > 0 and 0 elsewhere.
    """
    rho_t, s_t = ramps.rho_tilde, ramps.s_tilde
    if (rho_t.is_constant and s_t.is_constant) or ramps.b >= ramps.p_inf:
        return smoothfn.zero()
    gamma, a = eos.gamma, eos.a

    def evaluate(z, k):
        rho = rho_t(z)
        r1 = rho_t(z, 1)
        s1 = s_t(z, 1)
        prefactor = np.exp(a * s_t(z)) * rho ** (gamma - 2.0)
        inner = gamma * r1 + a * rho * s1
        G = prefactor * inner
        if np.any(G < 0.0):
            where = float(np.atleast_1d(z)[G < 0.0][0])
            raise ConstructionError("d/dz pi(rho_t, s_t) < 0 at z=%.12g: ramps are not monotone" % where, z=where)
        psi = np.sqrt(G)
        if k == 0:
            return psi
        r2 = rho_t(z, 2)
        s2 = s_t(z, 2)
        dG = prefactor * ((a * s1 + (gamma - 2.0) * r1 / rho) * inner
                          + gamma * r2 + a * r1 * s1 + a * rho * s2)
        safe = np.where(psi > 0.0, psi, 1.0)
        return np.where(psi > 0.0, dG / (2.0 * safe), 0.0)

    return smoothfn.SmoothProfile(evaluate, support=(ramps.b, ramps.p_inf), class_order=1, max_order=1,
                                  name="psi_from_ramps")


# ================================================================
# Psi first: rho_t from the ODE
# ================================================================

class _DensityOde(object):
    """rho' = A(z) rho^(2-gamma) - B(z) rho with A = Psi^2 e^(-a s)/gamma, B = a s'/gamma.

    A and B are tabulated on a quarter-step grid so that the RK4 marches with
    step h (stride 4) and h/2 (stride 2) share the same samples.
    """

    def __init__(self, psi, s_tilde, eos, b, p_inf, step):
        self.psi = psi
        self.s_tilde = s_tilde
        self.gamma = eos.gamma
        self.a = eos.a
        self.exponent = 2.0 - eos.gamma
        self.n_steps = max(1, int(np.ceil((p_inf - b) / step)))
        self.h = (p_inf - b) / self.n_steps
        self.z = np.linspace(b, p_inf, 4 * self.n_steps + 1)
        self.A, self.B = self.coefficients(self.z)

    def coefficients(self, z):
        decay = np.exp(-self.a * self.s_tilde(z))
        return self.psi(z) ** 2 * decay / self.gamma, self.a * self.s_tilde(z, 1) / self.gamma

    def coefficient_slopes(self, z):
        psi = self.psi(z)
        s1 = self.s_tilde(z, 1)
        decay = np.exp(-self.a * self.s_tilde(z))
        dA = (2.0 * psi * self.psi(z, 1) - self.a * s1 * psi ** 2) * decay / self.gamma
        return dA, self.a * self.s_tilde(z, 2) / self.gamma

    def rhs(self, A, B, rho):
        return A * rho ** self.exponent - B * rho

    def march(self, rho_0, stride):
        """Classical RK4, vectorized over an array of initial values; returns (z nodes, path)."""
        n = (len(self.z) - 1) // stride
        dz = self.h * stride / 4.0
        half = stride // 2
        A, B = self.A, self.B
        y = np.array(rho_0, dtype=float, ndmin=1)
        path = np.empty((n + 1,) + y.shape)
        path[0] = y
        with np.errstate(all='ignore'):
            for i in range(n):
                j = i * stride
                k1 = self.rhs(A[j], B[j], y)
                k2 = self.rhs(A[j + half], B[j + half], y + 0.5 * dz * k1)
                k3 = self.rhs(A[j + half], B[j + half], y + 0.5 * dz * k2)
                k4 = self.rhs(A[j + stride], B[j + stride], y + dz * k3)
                y = y + dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
                path[i + 1] = y
        return self.z[::stride], path


class OdeProfile(smoothfn.SmoothProfile):
    """Density ramp from the ODE; the first derivative is the ODE right-hand side itself."""

    def __init__(self, ode, z, rho, error_estimate):
        self._ode = ode
        self.terminal_value = float(rho[-1])
        self.error_estimate = float(error_estimate)
        A, B = ode.A[::2], ode.B[::2]
        self._spline = CubicHermiteSpline(z, rho, ode.rhs(A, B, rho))
        super().__init__(self._evaluate, support=(z[0], z[-1]), class_order=2, max_order=2,
                         outside=(rho[0], rho[-1]), name="rho_from_psi")

    def _evaluate(self, z, k):
        rho = self._spline(z)
        if k == 0:
            return rho
        A, B = self._ode.coefficients(z)
        f = self._ode.rhs(A, B, rho)
        if k == 1:
            return f
        dA, dB = self._ode.coefficient_slopes(z)
        e = self._ode.exponent
        return dA * rho ** e - dB * rho + (e * A * rho ** (e - 1.0) - B) * f


def _flat_density(rho_0):
    profile = smoothfn.constant(rho_0)
    profile.terminal_value = float(rho_0)
    profile.error_estimate = 0.0
    return profile


def _check_ode_inputs(psi, rho_0, b, p_inf, step):
    if not (np.isfinite(rho_0) and rho_0 > 0.0):
        raise ConfigurationError("rho_0 must be > 0, got %r" % (rho_0,))
    if not step > 0.0:
        raise ConfigurationError("ode step must be > 0, got %r" % (step,))
    if b > p_inf:
        raise ConfigurationError("b=%r must not exceed p_inf=%r" % (b, p_inf))
    if psi.is_constant and psi.value != 0.0:
        raise ConfigurationError("psi must vanish outside [b, p_inf], got constant %r" % psi.value)
    if psi.bounded and (psi.support[0] < b or psi.support[1] > p_inf):
        raise ConfigurationError("psi support %s is not inside [b, p_inf] = [%r, %r]" % (psi.support, b, p_inf))


def _first_breach(z, path):
    bad = ~(np.isfinite(path) & (path > 0.0))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise VacuumError(float(z[i]), float(path[i]))


def rho_from_psi(psi, s_tilde, rho_0, eos, b, p_inf, step=DEFAULT_ODE_STEP, tol=DEFAULT_ODE_TOL):
    """Integrate rho_t from rho_t(b) = rho_0 to p_inf; flat extension on both sides.

    The result carries `terminal_value` (the achieved far-field density) and
    `error_estimate` (relative Richardson estimate of the step-h march).
    """
    _check_ode_inputs(psi, rho_0, b, p_inf, step)
    if b == p_inf or (psi.is_constant and s_tilde.is_constant):
        return _flat_density(rho_0)

    ode = _DensityOde(psi, s_tilde, eos, b, p_inf, step)
    z_coarse, coarse = ode.march(rho_0, 4)
    z_fine, fine = ode.march(rho_0, 2)
    _first_breach(z_fine, fine[:, 0])
    _first_breach(z_coarse, coarse[:, 0])
    fine = fine[:, 0]

    estimate = float(np.max(np.abs(fine[::2] - coarse[:, 0])) / 15.0 / np.max(np.abs(fine)))
    if estimate > tol:
        suggested = ode.h * (tol / estimate) ** 0.25
        raise AccuracyError(estimate, tol, suggested)

    profile = OdeProfile(ode, z_fine, fine, estimate)
    logger.debug("rho_from_psi: %d steps of %.3g, rho_inf=%.15g, richardson=%.3g"
                 % (ode.n_steps, ode.h, profile.terminal_value, estimate))
    return profile


def shoot_rho0(psi, s_tilde, target_rho_inf, eos, b, p_inf, tol=DEFAULT_SHOOT_TOL, step=DEFAULT_ODE_STEP):
    """rho_0 such that rho_from_psi(...)(p_inf) = target_rho_inf within tol.

    The terminal density is increasing in rho_0; a log-spaced scan over the
    bracket locates the sign change and brentq refines it.
    """
    if not (np.isfinite(target_rho_inf) and target_rho_inf > 0.0):
        raise ConfigurationError("target rho_inf must be > 0, got %r" % (target_rho_inf,))
    _check_ode_inputs(psi, target_rho_inf, b, p_inf, step)
    if b == p_inf or (psi.is_constant and s_tilde.is_constant):
        return float(target_rho_inf)

    ode = _DensityOde(psi, s_tilde, eos, b, p_inf, step)

    def terminal(rho_0):
        _, path = ode.march(rho_0, 2)
        valid = np.all(np.isfinite(path) & (path > 0.0), axis=0)
        return np.where(valid, path[-1], np.nan)

    bracket = None
    for lo, hi in (SHOOT_BRACKET, WIDENED_BRACKET):
        candidates = target_rho_inf * np.logspace(np.log10(lo), np.log10(hi), SHOOT_SCAN)
        miss = terminal(candidates) - target_rho_inf
        bracket = _sign_change(candidates, miss)
        if bracket is not None:
            break
        logger.warn("shooting: no sign change in [%g, %g] x target, widening" % (lo, hi))
    if bracket is None:
        raise ShootingError("target rho_inf=%r unreachable for rho_0 in [%g, %g] x target"
                            % ((target_rho_inf,) + WIDENED_BRACKET))

    calls = [0]

    def residual(rho_0):
        calls[0] += 1
        return float(terminal(rho_0)[0]) - target_rho_inf

    if bracket[0] == bracket[1]:
        rho_0 = bracket[0]
    else:
        rho_0 = brentq(residual, bracket[0], bracket[1], xtol=1e-3 * tol * target_rho_inf, maxiter=200)
    achieved = residual(rho_0)
    if not abs(achieved) <= tol:
        raise ShootingError("shooting converged to rho_0=%.15g but misses the target by %.3g" % (rho_0, achieved))
    logger.info("shooting: rho_0=%.15g after %d marches (miss %.3g)" % (rho_0, calls[0], achieved))
    return float(rho_0)


def _sign_change(candidates, miss):
    for i in range(len(candidates)):
        if miss[i] == 0.0:
            return candidates[i], candidates[i]
    for i in range(len(candidates) - 1):
        if np.isfinite(miss[i]) and np.isfinite(miss[i + 1]) and miss[i] < 0.0 < miss[i + 1]:
            return candidates[i], candidates[i + 1]
    return None


def psi_first_ramps(psi, s_tilde, eos, b, p_inf, s_0, s_inf, rho_0=None, target_rho_inf=None,
                    step=DEFAULT_ODE_STEP, tol=DEFAULT_ODE_TOL, shoot_tol=DEFAULT_SHOOT_TOL):
    """RampPair for a prescribed Psi: rho_0 given, or shot for from the far-field target."""
    if (rho_0 is None) == (target_rho_inf is None):
        raise ConfigurationError("psi_first needs exactly one of rho_0 and a target rho_inf")
    if rho_0 is None:
        rho_0 = shoot_rho0(psi, s_tilde, target_rho_inf, eos, b, p_inf, tol=shoot_tol, step=step)
    rho_t = rho_from_psi(psi, s_tilde, rho_0, eos, b, p_inf, step=step, tol=tol)
    logger.info("psi_first: rho_0=%.15g achieved rho_inf=%.15g" % (rho_0, rho_t.terminal_value))
    return RampPair(rho_t, s_tilde, float(b), float(p_inf), float(rho_0), rho_t.terminal_value,
                    float(s_0), float(s_inf))


# ================================================================
# Lifted fields
# ================================================================

FarField = namedtuple('FarField', ['rho_inf', 's_inf', 'p_at_infinity'])


@dataclass
class FieldSample(object):
    """Fields at N points; gradients are [n, j] = d/dx_j (grad_u is [n, i, j] = d u_i / d x_j)."""
    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    s: np.ndarray
    pi: np.ndarray
    grad_rho: Optional[np.ndarray] = None
    grad_u: Optional[np.ndarray] = None
    grad_s: Optional[np.ndarray] = None
    grad_pi: Optional[np.ndarray] = None


class _SampledSolution(object):
    def sample(self, x, with_gradients=False):
        raise NotImplementedError

    def density(self, x):
        return self.sample(x).rho

    def velocity(self, x):
        return self.sample(x).u

    def entropy(self, x):
        return self.sample(x).s

    def pressure_field(self, x):
        return self.sample(x).pi

    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[-1] != self.dim:
            raise ValueError("expected points with %d coordinates, got shape %s" % (self.dim, x.shape))
        return x


class LiftedSolution(_SampledSolution):
    """rho = rho_t(P), s = s_t(P), u = Psi(P) U over any base exposing the seed interface."""

    def __init__(self, base, ramps, psi, eos):
        self.base = base
        self.ramps = ramps
        self.psi = psi
        self.eos = eos
        self.dim = base.dim
        self.support_radius = base.support_radius
        self.upstream_verified = base.upstream_verified
        p = np.array([base.p_inf])
        rho_inf = ramps.rho_tilde(p)
        s_inf = ramps.s_tilde(p)
        self.farfield = FarField(float(rho_inf[0]), float(s_inf[0]), float(eos.pressure(rho_inf, s_inf)[0]))

    @property
    def trivial(self):
        return bool(getattr(self.base, "trivial", False)) or self.psi.is_constant

    def psi_sup(self, samples=2001):
        if self.psi.is_constant:
            return abs(self.psi.value)
        z = np.linspace(self.ramps.b, self.ramps.p_inf, samples)
        return float(np.max(self.psi(z)))

    def sample(self, x, with_gradients=False):
        x = self._points(x)
        base, eos = self.base, self.eos
        rho_t, s_t = self.ramps.rho_tilde, self.ramps.s_tilde
        P = base.pressure(x)
        U = base.velocity(x)
        rho = rho_t(P)
        s = s_t(P)
        psi = self.psi(P)
        out = FieldSample(x=x, rho=rho, u=psi[:, None] * U, s=s, pi=eos.pressure(rho, s))
        if not with_gradients:
            return out

        grad_P = base.pressure_gradient(x)
        r1 = rho_t(P, 1)
        s1 = s_t(P, 1)
        d_rho, d_s = eos.pressure_partials(rho, s)
        out.grad_rho = r1[:, None] * grad_P
        out.grad_s = s1[:, None] * grad_P
        out.grad_u = (self.psi(P, 1)[:, None, None] * U[:, :, None] * grad_P[:, None, :]
                      + psi[:, None, None] * base.velocity_jacobian(x))
        out.grad_pi = (d_rho * r1 + d_s * s1)[:, None] * grad_P
        return out


def lift_solution(base, ramps, eos, psi=None):
    if abs(ramps.p_inf - base.p_inf) > 1e-12 * max(1.0, abs(base.p_inf)):
        raise ConfigurationError("ramps.p_inf=%r does not match the base far-field pressure %r"
                                 % (ramps.p_inf, base.p_inf))
    if ramps.b > base.p_min:
        raise ConfigurationError("ramps.b=%r exceeds the base minimum pressure p_min=%r; "
                                 "the ramps must be flat below inf P" % (ramps.b, base.p_min))
    if psi is None:
        psi = psi_from_ramps(ramps, eos)
    sol = LiftedSolution(base, ramps, psi, eos)
    if sol.trivial:
        logger.warn("lifted solution is the constant state (rho=%.6g, s=%.6g)"
                    % (sol.farfield.rho_inf, sol.farfield.s_inf))
    logger.info("lifted: rho_inf=%.15g s_inf=%.15g pi_inf=%.15g" % sol.farfield)
    return sol


class IncompressibleLift(_SampledSolution):
    """Non-homogeneous incompressible solution (rho(|x|), U, pi) behind the lifted-field interface.

    Entropy is identically 0; `farfield.rho_inf` is None unless the radial
    density is constant.
    """

    eos = None
    psi = None
    ramps = None

    def __init__(self, base):
        self.base = base
        self.dim = base.dim
        self.support_radius = base.support_radius
        self.upstream_verified = base.upstream_verified
        rho_inf = base.rho_radial.value if base.rho_radial.is_constant else None
        self.farfield = FarField(rho_inf, 0.0, float(base.p_inf))

    @property
    def trivial(self):
        return self.base.trivial

    def sample(self, x, with_gradients=False):
        x = self._points(x)
        base = self.base
        n = x.shape[0]
        out = FieldSample(x=x, rho=base.density(x), u=base.velocity(x), s=np.zeros(n), pi=base.pressure(x))
        if with_gradients:
            out.grad_rho = base.density_gradient(x)
            out.grad_u = base.velocity_jacobian(x)
            out.grad_s = np.zeros((n, self.dim))
            out.grad_pi = base.pressure_gradient(x)
        return out


def lift_inhomogeneous(base):
    return IncompressibleLift(base)


# ================================================================
# Diagnostics
# ================================================================

Violation = namedtuple('Violation', ['kind', 'z', 'value'])


def check_solv(ramps, samples=SOLV_SAMPLES):
    """Sampled check of the admissibility conditions of a ramp pair; returns a list of Violations."""
    violations = []
    rho_t, s_t = ramps.rho_tilde, ramps.s_tilde
    b, p_inf = ramps.b, ramps.p_inf
    if not ramps.rho_0 > 0.0:
        violations.append(Violation("rho_0_nonpositive", b, ramps.rho_0))

    for profile, name, lo, hi in ((rho_t, "rho", ramps.rho_0, ramps.rho_inf),
                                  (s_t, "s", ramps.s_0, ramps.s_inf)):
        below, above = profile(np.array([b, p_inf]))
        if below != lo:
            violations.append(Violation("%s_plateau_below" % name, b, float(below)))
        if above != hi:
            violations.append(Violation("%s_plateau_above" % name, p_inf, float(above)))

    if b >= p_inf:
        return violations

    z = np.linspace(b, p_inf, samples + 2)[1:-1]
    rho = rho_t(z)
    r1 = rho_t(z, 1)
    on_plateau = (rho == ramps.rho_0) | (rho == ramps.rho_inf)
    for i in np.flatnonzero(r1 < 0.0):
        violations.append(Violation("rho_decreasing", float(z[i]), float(r1[i])))
    if ramps.rho_0 < ramps.rho_inf:
        for i in np.flatnonzero((r1 == 0.0) & ~on_plateau):
            violations.append(Violation("rho_flat", float(z[i]), float(r1[i])))
    s1 = s_t(z, 1)
    for i in np.flatnonzero(s1 < 0.0):
        violations.append(Violation("s_decreasing", float(z[i]), float(s1[i])))
    return violations
