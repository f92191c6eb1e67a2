"""
Polytropic equation of state pi(rho, s) = rho**gamma * exp(a * s).

All functions accept scalars or numpy arrays. A second closure would live
next to EosParams behind the same function names.
"""

from dataclasses import dataclass

import numpy as np

from steady_euler.errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class EosParams(object):
    gamma: float = 1.4  # adiabatic exponent
    a: float = 1.0  # entropy coefficient

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma <= 1.0:
            raise ConfigurationError("eos.gamma must be > 1, got %r" % (self.gamma,))
        if not np.isfinite(self.a) or self.a <= 0.0:
            raise ConfigurationError("eos.a must be > 0, got %r" % (self.a,))

    def pressure(self, rho, s):
        return pressure(self, rho, s)

    def pressure_partials(self, rho, s):
        return pressure_partials(self, rho, s)

    def internal_energy(self, rho, s):
        return internal_energy(self, rho, s)

    def sound_speed(self, rho, pi):
        return sound_speed(self, rho, pi)

    def entropy_from(self, rho, pi):
        return entropy_from(self, rho, pi)


def _require(rho, strict, name):
    rho = np.asarray(rho, dtype=float)
    bad = ~(rho > 0.0) if strict else ~(rho >= 0.0)
    if np.any(bad):
        first = rho[bad].flat[0] if rho.ndim else float(rho)
        raise DomainError("%s needs rho %s 0, got %r" % (name, ">" if strict else ">=", first))
    return rho


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def pressure(p, rho, s):
    """rho**gamma * exp(a*s); exactly 0 at rho = 0."""
    rho = _require(rho, strict=False, name="pressure")
    return _out(rho ** p.gamma * np.exp(p.a * np.asarray(s, dtype=float)))


def pressure_partials(p, rho, s):
    """(d pi/d rho, d pi/d s) = (gamma rho^(gamma-1) e^(a s), a rho^gamma e^(a s))."""
    rho = _require(rho, strict=True, name="pressure_partials")
    growth = np.exp(p.a * np.asarray(s, dtype=float))
    return _out(p.gamma * rho ** (p.gamma - 1.0) * growth), _out(p.a * rho ** p.gamma * growth)


def internal_energy(p, rho, s):
    """Specific internal energy pi / ((gamma - 1) rho) of a gamma-law gas."""
    rho = _require(rho, strict=True, name="internal_energy")
    return _out(pressure(p, rho, s) / ((p.gamma - 1.0) * rho))


def total_energy(p, rho, velocity, s):
    """Energy density E = pi/(gamma-1) + rho |u|^2 / 2; velocity has components on the last axis."""
    rho = np.asarray(rho, dtype=float)
    kinetic = 0.5 * rho * np.sum(np.square(velocity), axis=-1)
    return _out(pressure(p, rho, s) / (p.gamma - 1.0) + kinetic)


def sound_speed(p, rho, pi):
    rho = _require(rho, strict=True, name="sound_speed")
    return _out(np.sqrt(p.gamma * np.asarray(pi, dtype=float) / rho))


def entropy_from(p, rho, pi):
    """Invert the state equation: s = (ln pi - gamma ln rho) / a."""
    rho = _require(rho, strict=True, name="entropy_from")
    return _out((np.log(pi) - p.gamma * np.log(rho)) / p.a)
