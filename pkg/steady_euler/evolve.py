"""
Finite-volume solver for the time-dependent planar Euler equations of a
gamma-law gas, used to check that a lifted state stays put.

Rusanov fluxes on minmod-limited linear reconstructions of (rho, u, pi),
SSP-RK2 in time, and two layers of Dirichlet ghost cells frozen at the
initial data.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage
from tqdm import tqdm

from steady_euler import eos as eos_lib
from steady_euler import logger
from steady_euler.errors import BlowUpError, ConfigurationError

GHOST = 2
MAX_CFL = 0.9


@dataclass
class ConservativeState(object):
    """Cell averages q[k, i, j] of (rho, rho u_x, rho u_y, E) on `grid` at `time`.

    `frame` holds the padded array whose two outer layers are the fixed ghost
    cells; `outflow` accumulates the conserved quantities that left through the
    boundary since t = 0.
    """
    q: np.ndarray
    grid: object
    eos: eos_lib.EosParams
    time: float
    frame: np.ndarray
    outflow: np.ndarray = field(default_factory=lambda: np.zeros(4))

    @property
    def cell_volume(self):
        return self.grid.h ** 2

    def totals(self):
        return self.cell_volume * np.sum(self.q.reshape(4, -1), axis=1)


def _conserved(rho, u, pi, gamma):
    kinetic = 0.5 * rho * np.sum(u * u, axis=-1)
    return np.stack([rho, rho * u[..., 0], rho * u[..., 1], pi / (gamma - 1.0) + kinetic])


def _admissibility(q, gamma, time):
    rho = q[0]
    internal = q[3] - 0.5 * (q[1] ** 2 + q[2] ** 2) / np.where(rho > 0.0, rho, 1.0)
    bad = ~(np.isfinite(q).all(axis=0) & (rho > 0.0) & (internal > 0.0))
    if np.any(bad):
        cell = tuple(int(i) for i in np.unravel_index(np.argmax(bad), bad.shape))
        reason = "non-positive density" if not rho[cell] > 0.0 else "non-positive internal energy"
        raise BlowUpError(time, cell, reason)


def discretize(sol, grid, eos):
    """Point values at cell centres (and ghost centres) converted to conservative variables."""
    if sol.dim != 2:
        raise ConfigurationError("evolution runs on planar solutions only")
    nx, ny = grid.dims
    ax, ay = grid.axes()
    pad = GHOST * grid.h
    gx = np.concatenate([ax[0] - pad + grid.h * np.arange(GHOST), ax, ax[-1] + grid.h * (1 + np.arange(GHOST))])
    gy = np.concatenate([ay[0] - pad + grid.h * np.arange(GHOST), ay, ay[-1] + grid.h * (1 + np.arange(GHOST))])
    X, Y = np.meshgrid(gx, gy, indexing='ij')
    f = sol.sample(np.stack([X.ravel(), Y.ravel()], axis=1))
    shape = X.shape
    frame = _conserved(f.rho.reshape(shape), f.u.reshape(shape + (2,)), f.pi.reshape(shape), eos.gamma)
    _admissibility(frame, eos.gamma, 0.0)
    q = frame[:, GHOST:GHOST + nx, GHOST:GHOST + ny].copy()
    return ConservativeState(q=q, grid=grid, eos=eos, time=0.0, frame=frame)


def primitive(state):
    """(rho, u, pi, s) from a state; u has components on the last axis."""
    gamma = state.eos.gamma
    rho = state.q[0]
    u = np.stack([state.q[1] / rho, state.q[2] / rho], axis=-1)
    pi = (gamma - 1.0) * (state.q[3] - 0.5 * rho * np.sum(u * u, axis=-1))
    return rho, u, pi, state.eos.entropy_from(rho, pi)


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _physical_flux(w, axis, gamma):
    rho, ux, uy, p = w
    un = ux if axis == 0 else uy
    energy = p / (gamma - 1.0) + 0.5 * rho * (ux * ux + uy * uy)
    return np.stack([rho * un,
                     rho * un * ux + (p if axis == 0 else 0.0),
                     rho * un * uy + (p if axis == 1 else 0.0),
                     (energy + p) * un])


def _face_fluxes(w, axis, gamma):
    """Rusanov fluxes through the faces of the interior cells along `axis` (primitives w on the padded frame)."""
    w = np.moveaxis(w, axis + 1, 1)
    other = slice(GHOST, w.shape[2] - GHOST)
    w = w[:, :, other]
    slope = _minmod(w[:, 1:-1] - w[:, :-2], w[:, 2:] - w[:, 1:-1])  # cells 1 .. N-2
    left = w[:, 1:-2] + 0.5 * slope[:, :-1]  # faces between cells i and i+1, i = 1 .. N-3
    right = w[:, 2:-1] - 0.5 * slope[:, 1:]
    left, right = np.moveaxis(left, 1, axis + 1), np.moveaxis(right, 1, axis + 1)

    q_left = _conserved(left[0], np.stack([left[1], left[2]], axis=-1), left[3], gamma)
    q_right = _conserved(right[0], np.stack([right[1], right[2]], axis=-1), right[3], gamma)
    speed = np.maximum(np.abs(left[1 + axis]) + np.sqrt(gamma * left[3] / left[0]),
                       np.abs(right[1 + axis]) + np.sqrt(gamma * right[3] / right[0]))
    return 0.5 * (_physical_flux(left, axis, gamma) + _physical_flux(right, axis, gamma)) \
        - 0.5 * speed * (q_right - q_left)


def _tendency(state, q):
    """(dq/dt, net boundary outflow rate) for interior values q."""
    gamma, h = state.eos.gamma, state.grid.h
    padded = state.frame.copy()
    nx, ny = state.grid.dims
    padded[:, GHOST:GHOST + nx, GHOST:GHOST + ny] = q
    rho = padded[0]
    w = np.stack([rho, padded[1] / rho, padded[2] / rho, np.zeros_like(rho)])
    w[3] = (gamma - 1.0) * (padded[3] - 0.5 * rho * (w[1] ** 2 + w[2] ** 2))

    fx = _face_fluxes(w, 0, gamma)  # (4, nx+1, ny)
    fy = _face_fluxes(w, 1, gamma)  # (4, nx, ny+1)
    dq = -(fx[:, 1:] - fx[:, :-1]) / h - (fy[:, :, 1:] - fy[:, :, :-1]) / h
    outflow = h * (np.sum(fx[:, -1], axis=1) - np.sum(fx[:, 0], axis=1)
                   + np.sum(fy[:, :, -1], axis=1) - np.sum(fy[:, :, 0], axis=1))
    return dq, outflow


def stable_dt(state, cfl):
    rho, u, pi, _ = primitive(state)
    speed = np.sqrt(np.sum(u * u, axis=-1)) + np.sqrt(state.eos.gamma * pi / rho)
    return cfl * state.grid.h / float(np.max(speed))


def step(state, cfl, dt=None):
    """One SSP-RK2 step; dt defaults to the CFL limit."""
    if not 0.0 < cfl <= MAX_CFL:
        raise ConfigurationError("cfl must lie in (0, %g], got %r" % (MAX_CFL, cfl))
    if dt is None:
        dt = stable_dt(state, cfl)
    gamma = state.eos.gamma
    l0, out0 = _tendency(state, state.q)
    q1 = state.q + dt * l0
    _admissibility(q1, gamma, state.time + dt)
    l1, out1 = _tendency(state, q1)
    q2 = 0.5 * state.q + 0.5 * (q1 + dt * l1)
    _admissibility(q2, gamma, state.time + dt)
    return replace(state, q=q2, time=state.time + dt, outflow=state.outflow + 0.5 * dt * (out0 + out1))


# ================================================================
# Drift monitoring
# ================================================================

DRIFT_FIELDS = ('rho', 'mom', 'energy')


def drift_norms(state, initial):
    d = state.q - initial.q
    vol = state.cell_volume
    pointwise = {'rho': np.abs(d[0]), 'mom': np.hypot(d[1], d[2]), 'energy': np.abs(d[3])}
    return {name: {'l1': float(vol * np.sum(v)), 'l2': float(np.sqrt(vol * np.sum(v * v))),
                   'linf': float(np.max(v))} for name, v in pointwise.items()}


@dataclass
class DriftReport(object):
    grid: object
    cfl: float
    times: list = field(default_factory=list)
    drift: dict = field(default_factory=lambda: {name: [] for name in DRIFT_FIELDS})
    steps: int = 0
    mass_balance: float = 0.0
    energy_balance: float = 0.0
    farfield_entropy: float = 0.0
    upstream_verified: bool = True

    def final(self, name, norm='l1'):
        return self.drift[name][-1][norm]

    def to_json(self):
        return {'grid': self.grid.to_json(), 'cfl': self.cfl, 'times': self.times, 'drift': self.drift,
                'steps': self.steps, 'mass_balance': self.mass_balance, 'energy_balance': self.energy_balance,
                'farfield_entropy': self.farfield_entropy, 'upstream_verified': self.upstream_verified}


def _balance(state, initial, k):
    start = initial.totals()[k]
    return float(abs(state.totals()[k] + state.outflow[k] - start) / max(abs(start), 1e-300))


def run(state, t_end, cfl, record_every=None, farfield=None, support_radius=None):
    """Advance to t_end, recording drift against the initial state every `record_every`.

    With `farfield` and `support_radius`, the largest deviation from s_inf of
    the entropy recovered in far-field cells is tracked as well. Far-field
    cells start outside the support and shrink by the stencil reach of one
    step (2 * GHOST cells) after every step, so they hold exactly the data the
    scheme has not yet been able to change.
    """
    if not t_end > 0.0:
        raise ConfigurationError("evolve.t_end must be > 0, got %r" % (t_end,))
    if not 0.0 < cfl <= MAX_CFL:
        raise ConfigurationError("cfl must lie in (0, %g], got %r" % (MAX_CFL, cfl))
    record_every = t_end if record_every is None else record_every
    if not record_every > 0.0:
        raise ConfigurationError("evolve.record_every must be > 0, got %r" % (record_every,))

    initial = state
    report = DriftReport(grid=state.grid, cfl=cfl)
    reached = None
    if farfield is not None and support_radius is not None:
        X, Y = np.meshgrid(*state.grid.axes(), indexing='ij')
        reached = np.hypot(X, Y) < support_radius + GHOST * state.grid.h
    reach = np.ones((3, 3), dtype=bool)

    def record(current):
        report.times.append(current.time)
        norms = drift_norms(current, initial)
        for name in DRIFT_FIELDS:
            report.drift[name].append(norms[name])
        if reached is not None and not np.all(reached):
            s = primitive(current)[3]
            report.farfield_entropy = max(report.farfield_entropy,
                                          float(np.max(np.abs(s[~reached] - farfield.s_inf))))
        logger.logkv('time', current.time)
        logger.logkv('steps', report.steps)
        for name in DRIFT_FIELDS:
            logger.logkv('drift_%s_l1' % name, norms[name]['l1'])
        logger.dumpkvs()

    record(state)
    next_record = min(record_every, t_end)
    with tqdm(total=t_end, disable=logger.progress_disabled(), unit='t', leave=False) as bar:
        while state.time < t_end:
            dt = min(stable_dt(state, cfl), next_record - state.time)
            previous = state.time
            state = step(state, cfl, dt=dt)
            if next_record - state.time <= 1e-12 * t_end:
                state = replace(state, time=next_record)
            report.steps += 1
            if reached is not None:
                reached = ndimage.binary_dilation(reached, structure=reach, iterations=2 * GHOST)
            bar.update(state.time - previous)
            if state.time >= next_record:
                record(state)
                next_record = min(next_record + record_every, t_end)

    report.mass_balance = _balance(state, initial, 0)
    report.energy_balance = _balance(state, initial, 3)
    logger.info("evolved to t=%.6g in %d steps; mass balance %.3g, energy balance %.3g"
                % (state.time, report.steps, report.mass_balance, report.energy_balance))
    return report
