"""
Independent checks that a lifted state solves the steady Euler system

    div(rho u) = 0,    div(rho u (x) u) + grad pi = 0,    div(rho s u) = 0.

`residual_fd` differences sampled field values only; `residual_analytic`
assembles the same residuals from the closed-form gradients. The virial,
far-field and pressure-deficit checks test the global properties.
"""

from collections import OrderedDict
from dataclasses import dataclass, field
import math
from typing import Optional

import numpy as np

from steady_euler import logger
from steady_euler import smoothfn
from steady_euler.errors import ConfigurationError

DEFAULT_SAMPLES = 10000
DEFAULT_SEED = 42
ANALYTIC_TOL = 1e-10
VIRIAL_TOL = 1e-8
ANGULAR_NODES = 64
VIRIAL_MAX_SUBINTERVALS = 1000

CORRUPTIONS = ("velocity_scale", "density_offset", "entropy_flip")

# central first-derivative stencils: sum of weight * (f[i+k] - f[i-k]), divided by denominator * h
_STENCILS = {
    2: ((1,), (1,), 2),
    4: ((1, 2), (8, -1), 12),
}

# equations whose terms vanish separately on a lifted state; their scale comes from the fields
_FIELD_SCALED = ('mass', 'entropy')


def equation_names(dim):
    return ['mass'] + ['mom' + 'xyz'[i] for i in range(dim)] + ['entropy']


@dataclass(frozen=True)
class Grid2D(object):
    origin: tuple
    h: float
    dims: tuple

    def __post_init__(self):
        if not (np.isfinite(self.h) and self.h > 0.0):
            raise ConfigurationError("grid.h must be > 0, got %r" % (self.h,))
        if len(self.dims) != 2 or min(self.dims) < 1:
            raise ConfigurationError("grid dims must be two positive integers, got %r" % (self.dims,))

    @classmethod
    def covering(cls, radius, h, margin):
        """Square node grid, symmetric about the origin, reaching past `radius` by `margin` cells."""
        half = math.ceil((radius + margin * h) / h - 1e-9)
        n = 2 * half + 1
        return cls(origin=(-half * h, -half * h), h=float(h), dims=(n, n))

    def refined(self, factor):
        """Same box, spacing h / factor."""
        return Grid2D(origin=self.origin, h=self.h / factor,
                      dims=tuple((n - 1) * factor + 1 for n in self.dims))

    def axes(self):
        return tuple(self.origin[a] + self.h * np.arange(self.dims[a]) for a in range(2))

    def points(self):
        X, Y = np.meshgrid(*self.axes(), indexing='ij')
        return np.stack([X.ravel(), Y.ravel()], axis=1)

    def to_json(self):
        return {'origin': [float(v) for v in self.origin], 'h': float(self.h), 'dims': [int(n) for n in self.dims]}


@dataclass
class ResidualReport(object):
    method: str
    equations: OrderedDict
    scales: OrderedDict
    points: int
    grid: Optional[Grid2D] = None
    upstream_verified: bool = True
    seed: Optional[int] = None

    def linf(self, name):
        return self.equations[name]['linf']

    def passes(self, rel_tol):
        return all(norms['linf'] <= rel_tol * self.scales[name] for name, norms in self.equations.items())

    def to_json(self):
        return {
            'method': self.method,
            'grid': self.grid.to_json() if self.grid is not None else None,
            'equations': {name: dict(norms) for name, norms in self.equations.items()},
            'scales': dict(self.scales),
            'points': self.points,
            'upstream_verified': self.upstream_verified,
            'seed': self.seed,
        }


def _norms(values, cell_volume):
    if values.size == 0:
        return {'linf': 0.0, 'l2': 0.0}
    return {'linf': float(np.max(np.abs(values))),
            'l2': float(np.sqrt(cell_volume * np.sum(values * values)))}


def random_points(sol, n=DEFAULT_SAMPLES, rng=None):
    """Uniform points in the box reaching a quarter past the support radius."""
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    reach = 1.25 * sol.support_radius if sol.support_radius > 0.0 else 1.0
    return rng.uniform(-reach, reach, size=(n, sol.dim))


# ================================================================
# Residuals
# ================================================================

def _fluxes(sample, dim):
    rho, u, s, pi = sample.rho, sample.u, sample.s, sample.pi
    flux = OrderedDict()
    flux['mass'] = [rho * u[:, j] for j in range(dim)]
    for i in range(dim):
        flux['mom' + 'xyz'[i]] = [rho * u[:, i] * u[:, j] + (pi if i == j else 0.0) for j in range(dim)]
    flux['entropy'] = [rho * s * u[:, j] for j in range(dim)]
    return flux


def residual_fd(sol, grid, order=2):
    """Conservative residuals with central differences of the given order on interior nodes."""
    if order not in _STENCILS:
        raise ConfigurationError("fd order must be 2 or 4, got %r" % (order,))
    if sol.dim != 2:
        raise ConfigurationError("finite-difference residuals are evaluated on planar solutions only")
    offsets, weights, denominator = _STENCILS[order]
    w = max(offsets)
    nx, ny = grid.dims
    if min(nx, ny) < 2 * w + 1:
        raise ConfigurationError("grid %s too small for the order-%d stencil" % (grid.dims, order))

    sample = sol.sample(grid.points())
    flux = _fluxes(sample, 2)
    equations = OrderedDict()
    scales = OrderedDict()
    for name, (fx, fy) in flux.items():
        fx = fx.reshape(nx, ny) if np.ndim(fx) else np.full((nx, ny), fx)
        fy = fy.reshape(nx, ny) if np.ndim(fy) else np.full((nx, ny), fy)
        res = np.zeros((nx - 2 * w, ny - 2 * w))
        for off, wt in zip(offsets, weights):
            res += wt * (fx[w + off:nx - w + off, w:ny - w] - fx[w - off:nx - w - off, w:ny - w])
            res += wt * (fy[w:nx - w, w + off:ny - w + off] - fy[w:nx - w, w - off:ny - w - off])
        res /= denominator * grid.h
        equations[name] = _norms(res, grid.h ** 2)
        scales[name] = float(max(np.max(np.abs(fx)), np.max(np.abs(fy))))
    return ResidualReport(method='fd%d' % order, equations=equations, scales=scales, points=res.size,
                          grid=grid, upstream_verified=sol.upstream_verified)


def residual_terms(sol, points):
    """Per-equation residual and its pointwise size, from exact gradients.

    Momentum is sized by the sum of the absolute values of its terms. Mass
    and entropy are sized by the fields: |u||grad rho| + rho|grad u| for mass,
    and |s| times that plus rho|u||grad s| for entropy.
    """
    f = sol.sample(points, with_gradients=True)
    dim = sol.dim
    div_u = np.trace(f.grad_u, axis1=1, axis2=2)
    u_grad_rho = np.sum(f.grad_rho * f.u, axis=1)
    rho_div_u = f.rho * div_u
    speed = np.linalg.norm(f.u, axis=1)
    mass_size = speed * np.linalg.norm(f.grad_rho, axis=1) + f.rho * np.linalg.norm(f.grad_u, axis=(1, 2))

    out = OrderedDict()
    out['mass'] = (u_grad_rho + rho_div_u, mass_size)
    advection = np.einsum('nij,nj->ni', f.grad_u, f.u)
    for i in range(dim):
        terms = (f.u[:, i] * u_grad_rho, f.u[:, i] * rho_div_u, f.rho * advection[:, i], f.grad_pi[:, i])
        out['mom' + 'xyz'[i]] = (sum(terms), sum(np.abs(t) for t in terms))
    terms = (f.s * u_grad_rho, f.rho * np.sum(f.grad_s * f.u, axis=1), f.s * rho_div_u)
    entropy_size = np.abs(f.s) * mass_size + f.rho * speed * np.linalg.norm(f.grad_s, axis=1)
    out['entropy'] = (sum(terms), entropy_size)
    return out


def residual_analytic(sol, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    equations = OrderedDict()
    scales = OrderedDict()
    for name, (res, size) in residual_terms(sol, points).items():
        equations[name] = _norms(res, 1.0 / len(points))
        scales[name] = float(np.max(size)) if size.size else 0.0
        if name in _FIELD_SCALED:
            scales[name] = max(scales[name], 1.0)
    return ResidualReport(method='analytic', equations=equations, scales=scales, points=len(points),
                          upstream_verified=sol.upstream_verified)


def fit_order(hs, errors):
    """Least-squares slope of log(error) against log(h); nan when any error is 0."""
    errors = np.asarray(errors, dtype=float)
    if np.any(errors <= 0.0) or len(errors) < 2:
        return float('nan')
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


@dataclass
class ConvergenceTable(object):
    order: int
    reports: list
    orders: OrderedDict = field(default_factory=OrderedDict)

    @property
    def hs(self):
        return [r.grid.h for r in self.reports]

    def to_json(self):
        return {'stencil_order': self.order, 'h': self.hs,
                'linf': {name: [r.linf(name) for r in self.reports] for name in self.orders},
                'fitted_order': dict(self.orders)}


def fd_convergence(sol, grid, levels=3, order=2):
    reports = []
    for level in range(levels):
        g = grid.refined(2 ** level)
        with logger.timed("fd%d residuals on h=%.6g (%dx%d)" % (order, g.h, g.dims[0], g.dims[1])):
            reports.append(residual_fd(sol, g, order))
    table = ConvergenceTable(order=order, reports=reports)
    for name in reports[0].equations:
        table.orders[name] = fit_order(table.hs, [r.linf(name) for r in reports])
    return table


# ================================================================
# Global checks
# ================================================================

@dataclass
class VirialReport(object):
    kinetic: float
    pressure_deficit: float
    identity_residual: float
    trivial: bool

    @property
    def bound(self):
        return max(self.kinetic, abs(self.pressure_deficit), 1.0)

    def passes(self, rel_tol=VIRIAL_TOL):
        if self.identity_residual > rel_tol * self.bound:
            return False
        return self.trivial or (self.kinetic > 0.0 and self.pressure_deficit < 0.0)

    def to_json(self):
        return {'kinetic': self.kinetic, 'pressure_deficit': self.pressure_deficit,
                'identity_residual': self.identity_residual, 'bound': self.bound, 'trivial': self.trivial}


def virial_check(sol, quad_tol=smoothfn.DEFAULT_REL_TOL, angular_nodes=ANGULAR_NODES):
    """K = int rho |u|^2 and D = int (pi - pi_inf) over the support disc; returns |K + 2 D|.

    Radius by adaptive quadrature with the radial breakpoints, angle by the
    periodic trapezoid rule.
    """
    if sol.dim != 2:
        raise ConfigurationError("the virial check integrates planar solutions only")
    p_inf = sol.farfield.p_at_infinity
    radius = sol.support_radius
    if radius <= 0.0:
        return VirialReport(0.0, 0.0, 0.0, trivial=True)

    theta = 2.0 * np.pi * np.arange(angular_nodes) / angular_nodes
    ring = np.stack([np.cos(theta), np.sin(theta)], axis=1)

    def angular_means(r):
        f = sol.sample(r * ring)
        kinetic = f.rho * np.sum(f.u * f.u, axis=1)
        return float(np.mean(kinetic)), float(np.mean(f.pi - p_inf))

    def kinetic(r):
        return 2.0 * np.pi * r * angular_means(r)[0]

    def deficit(r):
        return 2.0 * np.pi * r * angular_means(r)[1]

    points = [p for p in getattr(sol.base, "radial_breakpoints", ()) if 0.0 < p < radius]
    floor = 1e-2 * quad_tol
    K = smoothfn.integrate(kinetic, 0.0, radius, quad_tol, points=points, abs_tol=floor,
                           max_subintervals=VIRIAL_MAX_SUBINTERVALS)
    D = smoothfn.integrate(deficit, 0.0, radius, quad_tol, points=points, abs_tol=floor,
                           max_subintervals=VIRIAL_MAX_SUBINTERVALS)
    report = VirialReport(K, D, abs(K + 2.0 * D), trivial=bool(sol.trivial))
    logger.info("virial: K=%.12g D=%.12g |K+2D|=%.3g" % (K, D, report.identity_residual))
    return report


@dataclass
class FarfieldReport(object):
    passed: bool
    radius: float
    samples: int
    violations: int
    first_violations: list

    def to_json(self):
        return {'passed': self.passed, 'radius': self.radius, 'samples': self.samples,
                'violations': self.violations, 'first_violations': self.first_violations}


def _shell_points(dim, r_lo, r_hi, n, rng):
    direction = rng.normal(size=(n, dim))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    return rng.uniform(r_lo, r_hi, size=n)[:, None] * direction


def farfield_check(sol, radius, samples=1000, rng=None):
    """Bitwise comparison with the far-field state on the shell radius <= |x| <= 2 radius."""
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    if radius <= 0.0:
        radius = 1.0
    x = _shell_points(sol.dim, radius, 2.0 * radius, samples, rng)
    f = sol.sample(x)
    rho_inf, s_inf, p_at_infinity = sol.farfield
    bad = np.any(f.u != 0.0, axis=1) | (f.s != s_inf) | (f.pi != p_at_infinity)
    if rho_inf is not None:
        bad |= f.rho != rho_inf
    where = np.flatnonzero(bad)
    report = FarfieldReport(passed=where.size == 0, radius=float(radius), samples=samples,
                            violations=int(where.size), first_violations=[x[i].tolist() for i in where[:5]])
    if not report.passed:
        logger.warn("far field: %d of %d samples differ from the constant state beyond r=%.6g"
                    % (where.size, samples, radius))
    return report


@dataclass
class DeficitReport(object):
    trivial: bool
    p_min: float
    p_inf: float
    center: list
    ball_radius: float
    passed: bool

    def to_json(self):
        return {'trivial': self.trivial, 'p_min': self.p_min, 'p_inf': self.p_inf, 'center': self.center,
                'ball_radius': self.ball_radius, 'passed': self.passed}


def pressure_deficit_check(base, samples=100, rng=None):
    """p_min < p_inf, and P < p_inf on a ball around the minimizer."""
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    dim = base.dim
    if base.trivial or base.p_min >= base.p_inf:
        return DeficitReport(True, float(base.p_min), float(base.p_inf), [0.0] * dim, 0.0,
                             passed=bool(base.trivial))

    reach = base.support_radius
    candidates = np.concatenate([np.zeros((1, dim)), rng.uniform(-reach, reach, size=(999, dim))])
    center = candidates[int(np.argmin(base.pressure(candidates)))]

    radii = np.linspace(0.0, 2.0 * reach, 2001)
    along = center + radii[:, None] * np.eye(dim)[0]
    below = base.pressure(along) < base.p_inf
    ball = float(radii[np.argmin(below) - 1]) if not np.all(below) else float(radii[-1])
    if not below[0]:
        ball = 0.0

    passed = ball > 0.0
    if passed:
        x = center + _shell_points(dim, 0.0, 0.99 * ball, samples, rng)
        passed = bool(np.all(base.pressure(x) < base.p_inf))
    logger.info("pressure deficit: p_min=%.12g < p_inf=%.12g on a ball of radius %.6g"
                % (base.p_min, base.p_inf, ball))
    return DeficitReport(False, float(base.p_min), float(base.p_inf), center.tolist(), ball, passed)


# ================================================================
# Negative controls
# ================================================================

class CorruptedSolution(object):
    """A solution with one canned defect; every other attribute is the wrapped solution's."""

    def __init__(self, sol, kind):
        if kind not in CORRUPTIONS:
            raise ConfigurationError("corruption must be one of %s, got %r" % (CORRUPTIONS, kind))
        if kind == "entropy_flip" and getattr(sol, "ramps", None) is None:
            raise ConfigurationError("entropy_flip needs a lifted solution with entropy ramps")
        self._sol = sol
        self.kind = kind

    def __getattr__(self, name):
        return getattr(self._sol, name)

    def sample(self, x, with_gradients=False):
        f = self._sol.sample(x, with_gradients)
        if self.kind == "velocity_scale":
            f.u = 1.1 * f.u
            if with_gradients:
                f.grad_u = 1.1 * f.grad_u
        elif self.kind == "density_offset":
            inside = np.sum(f.x * f.x, axis=1) < self._sol.support_radius ** 2
            f.rho = np.where(inside, f.rho + 0.1, f.rho)
        else:
            ramps, eos = self._sol.ramps, self._sol.eos
            f.s = ramps.s_0 + ramps.s_inf - f.s
            f.pi = eos.pressure(f.rho, f.s)
            if with_gradients:
                f.grad_s = -f.grad_s
                d_rho, d_s = eos.pressure_partials(f.rho, f.s)
                f.grad_pi = d_rho[:, None] * f.grad_rho + d_s[:, None] * f.grad_s
        return f


def corrupt(sol, kind):
    return CorruptedSolution(sol, kind)
