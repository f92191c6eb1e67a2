"""
Externally supplied three-dimensional seeds (U, P) sampled on a structured
grid, evaluated by trilinear interpolation behind the same interface as the
planar vortex. Their upstream quality is unknown, so every solution built on
one is flagged `upstream_verified = False`.
"""

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from steady_euler import fileio
from steady_euler import logger
from steady_euler.errors import IngestionError


class GriddedSeed3D(object):
    dim = 3
    upstream_verified = False

    def __init__(self, seed):
        self.seed = seed
        self.p_inf = float(seed.p_inf)
        self.support_radius = float(seed.support_radius)
        axes = seed.axes()
        self._lo = np.array([a[0] for a in axes])
        self._hi = np.array([a[-1] for a in axes])

        def interpolant(values):
            return RegularGridInterpolator(axes, values, method='linear', bounds_error=False, fill_value=None)

        self._U = interpolant(seed.U)
        self._gradU = interpolant(seed.gradU.reshape(seed.dims + (9,)))
        self._P = interpolant(seed.P)
        self._gradP = interpolant(seed.gradP)

        self.trivial = not np.any(seed.U)
        self.p_min = min(float(np.min(seed.P)), self.p_inf)
        self.inner_radius = 0.0

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[-1] != 3:
            raise ValueError("expected points with 3 coordinates, got shape %s" % (x.shape,))
        inside = np.sum(x * x, axis=1) < self.support_radius ** 2
        return x, inside, np.clip(x[inside], self._lo, self._hi)

    def velocity(self, x):
        x, inside, xi = self._split(x)
        out = np.zeros((x.shape[0], 3))
        out[inside] = self._U(xi)
        return out

    def velocity_jacobian(self, x):
        x, inside, xi = self._split(x)
        out = np.zeros((x.shape[0], 3, 3))
        out[inside] = self._gradU(xi).reshape(-1, 3, 3)
        return out

    def pressure(self, x):
        x, inside, xi = self._split(x)
        out = np.full(x.shape[0], self.p_inf)
        out[inside] = np.minimum(self._P(xi), self.p_inf)
        return out

    def pressure_gradient(self, x):
        x, inside, xi = self._split(x)
        out = np.zeros((x.shape[0], 3))
        out[inside] = self._gradP(xi)
        return out

    def node_diagnostics(self):
        """Divergence and orthogonality defects at the sampled nodes."""
        seed = self.seed
        divergence = np.abs(np.trace(seed.gradU, axis1=-2, axis2=-1))
        orthogonality = np.abs(np.sum(seed.U * seed.gradP, axis=-1))
        scale = max(float(np.max(np.linalg.norm(seed.U, axis=-1) * np.linalg.norm(seed.gradP, axis=-1))), 1.0)
        return {'divergence_max': float(np.max(divergence)),
                'orthogonality_max': float(np.max(orthogonality)),
                'orthogonality_scale': scale}


def ingest_seed3d(path):
    seed = fileio.read_seed(path)
    for name, arr in (("U", seed.U), ("gradU", seed.gradU), ("P", seed.P), ("gradP", seed.gradP)):
        if not np.all(np.isfinite(arr)):
            raise IngestionError("seed file %s: non-finite values in %s" % (path, name))
    if min(seed.dims) < 2:
        raise IngestionError("seed file %s: need at least 2 nodes per axis, got %s" % (path, seed.dims))
    if not seed.support_radius >= 0.0:
        raise IngestionError("seed file %s: support_radius must be >= 0" % path)

    base = GriddedSeed3D(seed)
    diag = base.node_diagnostics()
    logger.info("ingested 3D seed %s: dims %s, p_min %.12g, p_inf %.12g" % (path, seed.dims, base.p_min, base.p_inf))
    logger.info("upstream defects (unverified): max|div U|=%.3g, max|U.grad P|=%.3g"
                % (diag['divergence_max'], diag['orthogonality_max']))
    return base
