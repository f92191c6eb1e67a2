"""
Two-dimensional steady incompressible seeds: the Rankine-type vortex

    U(x) = (-x2 Phi(|x|^2), x1 Phi(|x|^2)),    grad P(x) = Phi(|x|^2)^2 x,

and its variant with a radial density rho(|x|). The pressure value is built
from adaptive quadrature once, on a radial table, and interpolated with the
exact radial derivative; its gradient is always the closed form.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from steady_euler import logger
from steady_euler import smoothfn
from steady_euler.errors import ConfigurationError

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_RADIAL_NODES = 1024

VORTEX_SHAPES = ("bump", "annular_bump")


@dataclass(frozen=True)
class VortexSpec(object):
    shape: smoothfn.SmoothProfile  # Phi as a function of t = |x|^2
    p_inf: float

    def __post_init__(self):
        if not np.isfinite(self.p_inf):
            raise ConfigurationError("vortex.p_inf must be finite, got %r" % (self.p_inf,))
        if not (self.shape.is_constant or self.shape.bounded):
            raise ConfigurationError("vortex shape must have compact support in t = |x|^2")
        if self.shape.is_constant and self.shape.value != 0.0:
            raise ConfigurationError("a constant vortex shape must be identically zero")
        if self.shape.bounded and self.shape.support[1] <= 0.0:
            raise ConfigurationError("vortex shape support %s misses t >= 0" % (self.shape.support,))


def vortex_shape(kind, t1, t2, amplitude):
    """Phi for the configured vortex kind.

    "bump" is centred at t = 0 (support [-t2, t2], so Phi(0) = amplitude);
    "annular_bump" lives on [t1, t2] and leaves a quiescent core.
    """
    if amplitude == 0.0:
        return smoothfn.zero()
    if kind == "bump":
        return smoothfn.bump(-t2, t2, amplitude)
    elif kind == "annular_bump":
        if t1 < 0.0:
            raise ConfigurationError("vortex.t1 must be >= 0 for an annular bump, got %r" % (t1,))
        return smoothfn.bump(t1, t2, amplitude)
    raise ConfigurationError("vortex.shape must be one of %s, got %r" % (VORTEX_SHAPES, kind))


def _as_points(x, dim=2):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[-1] != dim:
        raise ValueError("expected points with %d coordinates, got shape %s" % (dim, x.shape))
    return x


class BaseSolution2D(object):
    """Steady incompressible pair (U, P) in the plane, with exact first derivatives.

    `weight(r)` multiplies the radial momentum balance; it is 1 for the
    homogeneous vortex and the radial density for the non-homogeneous variant.
    """

    dim = 2
    upstream_verified = True

    def __init__(self, spec, quad_tol=DEFAULT_QUAD_TOL, radial_nodes=DEFAULT_RADIAL_NODES, weight=None):
        self.spec = spec
        self.shape = spec.shape
        self.p_inf = float(spec.p_inf)
        self.quad_tol = quad_tol
        self._weight = weight if weight is not None else smoothfn.constant(1.0)

        if self.shape.is_constant:
            self.trivial = True
            self.inner_radius = 0.0
            self.support_radius = 0.0
            self.p_min = self.p_inf
            self._spline = None
            return

        t_lo, t_hi = self.shape.support
        self.trivial = False
        self.inner_radius = float(np.sqrt(max(t_lo, 0.0)))
        self.support_radius = float(np.sqrt(t_hi))
        self._spline, self.p_min = self._build_pressure_table(radial_nodes)

    @property
    def radial_breakpoints(self):
        return (self.inner_radius, self.support_radius)

    def _integrand(self, r):
        return self._weight(r) * r * self.shape(r * r) ** 2

    def _build_pressure_table(self, radial_nodes):
        r = np.linspace(self.inner_radius, self.support_radius, radial_nodes + 1)
        slope = self._integrand(r)
        # absolute floor far below the total deficit, so flat tails do not stall quad
        floor = self.quad_tol * 1e-3 * float(np.max(slope)) * (self.support_radius - self.inner_radius)
        increments = np.array([
            smoothfn.integrate(self._integrand, r[i], r[i + 1], self.quad_tol, abs_tol=floor)
            for i in range(radial_nodes)])
        deficit = np.concatenate([np.cumsum(increments[::-1])[::-1], [0.0]])
        values = self.p_inf - deficit
        values[-1] = self.p_inf
        logger.debug("radial pressure table: %d nodes, p_min=%.12g" % (radial_nodes + 1, values[0]))
        return CubicHermiteSpline(r, values, slope), float(values[0])

    def radial_pressure(self, r):
        """P at radius r by direct quadrature (no table), for single radii."""
        if self.trivial or r >= self.support_radius:
            return self.p_inf
        lower = max(r, self.inner_radius)
        return self.p_inf - smoothfn.integrate(self._integrand, lower, self.support_radius, self.quad_tol)

    def pressure_of_radius(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, self.p_inf)
        if self.trivial:
            return out
        inside = r < self.support_radius
        if np.any(inside):
            out[inside] = np.clip(self._spline(np.maximum(r[inside], self.inner_radius)), self.p_min, self.p_inf)
        return out

    # -- pointwise fields; x has shape (N, 2) --------------------------------

    def velocity(self, x):
        x = _as_points(x)
        phi = self.shape(np.sum(x * x, axis=1))
        return np.stack([-x[:, 1] * phi, x[:, 0] * phi], axis=1)

    def velocity_jacobian(self, x):
        """J[n, i, j] = d U_i / d x_j."""
        x = _as_points(x)
        t = np.sum(x * x, axis=1)
        phi = self.shape(t)
        dphi = self.shape(t, 1)
        cross = 2.0 * x[:, 0] * x[:, 1] * dphi
        jac = np.empty((x.shape[0], 2, 2))
        jac[:, 0, 0] = -cross
        jac[:, 0, 1] = -phi - 2.0 * x[:, 1] ** 2 * dphi
        jac[:, 1, 0] = phi + 2.0 * x[:, 0] ** 2 * dphi
        jac[:, 1, 1] = cross
        return jac

    def pressure(self, x):
        x = _as_points(x)
        return self.pressure_of_radius(np.hypot(x[:, 0], x[:, 1]))

    def pressure_gradient(self, x):
        x = _as_points(x)
        r = np.hypot(x[:, 0], x[:, 1])
        return (self._weight(r) * self.shape(r * r) ** 2)[:, None] * x


class InhomogeneousSolution2D(BaseSolution2D):
    """Vortex carrying a radial density rho(|x|); `pressure` is the balancing pi(|x|)."""

    def __init__(self, rho_radial, spec, quad_tol=DEFAULT_QUAD_TOL, radial_nodes=DEFAULT_RADIAL_NODES):
        self.rho_radial = rho_radial
        super().__init__(spec, quad_tol=quad_tol, radial_nodes=radial_nodes, weight=rho_radial)

    def density(self, x):
        x = _as_points(x)
        return self.rho_radial(np.hypot(x[:, 0], x[:, 1]))

    def density_gradient(self, x):
        x = _as_points(x)
        r = np.hypot(x[:, 0], x[:, 1])
        slope = self.rho_radial(r, 1)
        safe_r = np.where(r > 0.0, r, 1.0)
        return np.where(r > 0.0, slope / safe_r, 0.0)[:, None] * x


def make_rankine(spec, quad_tol=DEFAULT_QUAD_TOL, radial_nodes=DEFAULT_RADIAL_NODES):
    base = BaseSolution2D(spec, quad_tol=quad_tol, radial_nodes=radial_nodes)
    logger.info("vortex seed: support radius %.6g, p_min %.12g, p_inf %.12g"
                % (base.support_radius, base.p_min, base.p_inf))
    return base


def momentum_residual_base(b, x):
    """U.grad U + grad P, plus the density weight for the non-homogeneous variant."""
    x = _as_points(x)
    u = b.velocity(x)
    advection = np.einsum('nij,nj->ni', b.velocity_jacobian(x), u)
    if isinstance(b, InhomogeneousSolution2D):
        advection = b.density(x)[:, None] * advection
    return advection + b.pressure_gradient(x)


def make_inhomogeneous(rho_radial, spec, quad_tol=DEFAULT_QUAD_TOL, radial_nodes=DEFAULT_RADIAL_NODES):
    if not rho_radial.is_constant:
        shape = spec.shape
        if shape.bounded and shape.support[0] <= 0.0:
            raise ConfigurationError(
                "a non-constant radial density needs a vortex shape vanishing near t = 0, "
                "got support %s" % (shape.support,))
    if rho_radial.is_constant and rho_radial.value < 0.0:
        raise ConfigurationError("radial density must be >= 0, got %r" % rho_radial.value)
    if not rho_radial.is_constant:
        reach = 2.0 * np.sqrt(spec.shape.support[1]) if spec.shape.bounded else 1.0
        sampled = rho_radial(np.linspace(0.0, reach, 1001))
        if np.any(sampled < 0.0):
            raise ConfigurationError("radial density must be >= 0, min sampled value %r" % float(sampled.min()))
    return InhomogeneousSolution2D(rho_radial, spec, quad_tol=quad_tol, radial_nodes=radial_nodes)
