import argparse
import os
import sys

import numpy as np

from steady_euler import evolve
from steady_euler import fileio
from steady_euler import lift
from steady_euler import logger
from steady_euler import seed2d
from steady_euler import smoothfn
from steady_euler import verify
from steady_euler.config import load_config
from steady_euler.eos import EosParams
from steady_euler.errors import EXIT_OK, SteadyEulerError, VerificationFailure
from steady_euler.seed3d import ingest_seed3d
from steady_euler.utils import run_name, to_builtin

COMMANDS = ("construct", "verify", "converge", "evolve", "export")

FD_ORDER_RANGE = (1.7, 2.3)
DRIFT_ORDER_RANGE = (1.5, 2.5)
BALANCE_TOL = 1e-12
FARFIELD_ENTROPY_TOL = 1e-12


# ================================================================
# Construction
# ================================================================

def build_base(config):
    if config.seed3d_file is not None:
        return ingest_seed3d(config.seed3d_file)
    v = config.vortex
    shape = seed2d.vortex_shape(v.shape, v.t1, v.t2, v.amplitude)
    return seed2d.make_rankine(seed2d.VortexSpec(shape, v.p_inf), quad_tol=config.quad_tol)


def build_solution(config):
    """Base seed and its lift, following `ramps.direction`."""
    eos = EosParams(config.eos.gamma, config.eos.a)
    with logger.timed("constructing base solution"):
        base = build_base(config)
    r = config.ramps
    b = base.p_min if r.b is None else r.b
    p_inf = base.p_inf

    with logger.timed("lifting (%s)" % r.direction):
        if r.direction == "profile_first":
            ramps = lift.make_ramps(b, p_inf, r.rho_0, r.rho_inf, r.s_0, r.s_inf)
            for violation in lift.check_solv(ramps)[:5]:
                logger.warn("ramp admissibility: %s at z=%.12g (value %.3g)" % violation)
            return base, lift.lift_solution(base, ramps, eos)

        if b > p_inf:
            b = p_inf
        if b < p_inf:
            psi = smoothfn.bump(b, p_inf, r.psi_amplitude)
            s_tilde = smoothfn.ramp(r.s_0, r.s_inf, b, p_inf)
        else:
            psi, s_tilde = smoothfn.zero(), smoothfn.constant(r.s_inf)
        ramps = lift.psi_first_ramps(psi, s_tilde, eos, b, p_inf, r.s_0, r.s_inf, rho_0=r.rho_0,
                                     target_rho_inf=None if r.rho_0 is not None else r.rho_inf,
                                     step=r.ode_step, shoot_tol=r.shoot_tol)
        return base, lift.lift_solution(base, ramps, eos, psi=psi)


def summarize(config, base, sol):
    ramps = sol.ramps
    summary = {
        'p_min': base.p_min,
        'p_inf': base.p_inf,
        'b': ramps.b,
        'rho_0': ramps.rho_0,
        'rho_inf': sol.farfield.rho_inf,
        's_0': ramps.s_0,
        's_inf': sol.farfield.s_inf,
        'pi_inf': sol.farfield.p_at_infinity,
        'support_radius': sol.support_radius,
        'psi_sup': sol.psi_sup(),
        'direction': config.ramps.direction,
        'trivial': sol.trivial,
        'upstream_verified': sol.upstream_verified,
        'seed': config.seed,
    }
    if hasattr(ramps.rho_tilde, 'error_estimate'):
        summary['ode_error_estimate'] = ramps.rho_tilde.error_estimate
    if sol.trivial:
        summary['warning'] = "trivial solution: the lifted state is constant"
    return summary


def residual_grid(config, sol):
    return verify.Grid2D.covering(sol.support_radius if sol.support_radius > 0.0 else 1.0,
                                  config.grid.h, config.grid.margin)


def evolve_grid(config, sol):
    return verify.Grid2D.covering(sol.support_radius if sol.support_radius > 0.0 else 1.0,
                                  config.grid.h, config.grid.margin + config.evolve.margin)


# ================================================================
# Commands
# ================================================================

def cmd_construct(config, out_dir):
    base, sol = build_solution(config)
    summary = summarize(config, base, sol)
    logger.logkvs({k: v for k, v in summary.items() if not isinstance(v, str)})
    logger.dumpkvs()
    _write_report(config, out_dir, "construct", {'summary': summary})
    return sol, summary


def cmd_verify(config, out_dir):
    base, sol = build_solution(config)
    rng = np.random.default_rng(config.seed)
    document = {'summary': summarize(config, base, sol), 'seed': config.seed,
                'upstream_verified': sol.upstream_verified}
    gates = {}

    with logger.timed("analytic residuals on %d points" % config.samples):
        analytic = verify.residual_analytic(sol, verify.random_points(sol, config.samples, rng))
    analytic.seed = config.seed
    document['analytic'] = analytic.to_json()
    if sol.upstream_verified:
        gates['analytic'] = analytic.passes(verify.ANALYTIC_TOL)

    if sol.dim == 2:
        grid = residual_grid(config, sol)
        for order in (2, 4):
            with logger.timed("fd%d residuals on h=%.6g" % (order, grid.h)):
                document['fd%d' % order] = verify.residual_fd(sol, grid, order).to_json()
        with logger.timed("virial identity"):
            virial = verify.virial_check(sol, config.quad_tol)
        document['virial'] = virial.to_json()
        gates['virial'] = virial.passes()
    else:
        logger.warn("3D seed: finite-difference and virial checks are planar only, skipped")

    farfield = verify.farfield_check(sol, sol.support_radius, rng=rng)
    document['farfield'] = farfield.to_json()
    gates['farfield'] = farfield.passed
    deficit = verify.pressure_deficit_check(base, rng=rng)
    document['deficit'] = deficit.to_json()
    gates['deficit'] = deficit.passed

    document['gates'] = gates
    _write_report(config, out_dir, "verify", document)
    _print_gates(gates)
    if not all(gates.values()):
        raise VerificationFailure("verification gates failed: %s" % sorted(k for k, v in gates.items() if not v))
    return document


def _order_in(value, bounds):
    return not np.isfinite(value) or bounds[0] <= value <= bounds[1]


def cmd_converge(config, out_dir):
    base, sol = build_solution(config)
    if sol.dim != 2:
        raise VerificationFailure("convergence studies need a planar solution")
    levels = config.grid.refinements
    grid = residual_grid(config, sol)
    document = {'summary': summarize(config, base, sol), 'seed': config.seed}

    fd2 = verify.fd_convergence(sol, grid, levels, order=2)
    fd4 = verify.fd_convergence(sol, grid, levels, order=4)
    document['fd2'] = fd2.to_json()
    document['fd4'] = fd4.to_json()

    eos = sol.eos or EosParams(config.eos.gamma, config.eos.a)
    coarse = evolve_grid(config, sol)
    hs, drift = [], {name: [] for name in evolve.DRIFT_FIELDS}
    for level in range(levels):
        g = coarse.refined(2 ** level)
        with logger.timed("evolving on h=%.6g (%dx%d)" % (g.h, g.dims[0], g.dims[1])):
            report = evolve.run(evolve.discretize(sol, g, eos), config.evolve.t_end, config.evolve.cfl,
                                config.evolve.t_end)
        hs.append(g.h)
        for name in evolve.DRIFT_FIELDS:
            drift[name].append(report.final(name))
    drift_orders = {name: verify.fit_order(hs, drift[name]) for name in evolve.DRIFT_FIELDS}
    document['drift'] = {'h': hs, 'l1': drift, 'fitted_order': drift_orders}

    logger.info(logger.fmt_row(12, ["equation", "fd2 order", "fd4 order"], header=True))
    for name in fd2.orders:
        logger.info(logger.fmt_row(12, [name, fd2.orders[name], fd4.orders[name]]))
    logger.info(logger.fmt_row(12, ["field", "drift order"], header=True))
    for name, value in drift_orders.items():
        logger.info(logger.fmt_row(12, [name, value]))

    gates = {'fd2_order': all(_order_in(v, FD_ORDER_RANGE) for v in fd2.orders.values()),
             'drift_order': all(_order_in(v, DRIFT_ORDER_RANGE) for v in drift_orders.values())}
    document['gates'] = gates
    _write_report(config, out_dir, "converge", document)
    _print_gates(gates)
    if not all(gates.values()):
        raise VerificationFailure("convergence gates failed: %s" % sorted(k for k, v in gates.items() if not v))
    return document


def cmd_evolve(config, out_dir):
    base, sol = build_solution(config)
    eos = sol.eos or EosParams(config.eos.gamma, config.eos.a)
    grid = evolve_grid(config, sol)
    state = evolve.discretize(sol, grid, eos)
    with logger.timed("evolving to t=%g on %dx%d cells" % (config.evolve.t_end, grid.dims[0], grid.dims[1])):
        report = evolve.run(state, config.evolve.t_end, config.evolve.cfl, config.evolve.record_every,
                            farfield=sol.farfield, support_radius=sol.support_radius)
    report.upstream_verified = sol.upstream_verified
    document = report.to_json()
    document['seed'] = config.seed
    gates = {'mass_balance': report.mass_balance <= BALANCE_TOL,
             'energy_balance': report.energy_balance <= BALANCE_TOL,
             'farfield_entropy': report.farfield_entropy <= FARFIELD_ENTROPY_TOL}
    document['gates'] = gates
    _write_report(config, out_dir, "evolve", document)
    _print_gates(gates)
    if not all(gates.values()):
        raise VerificationFailure("conservation gates failed: %s" % sorted(k for k, v in gates.items() if not v))
    return report


def export_columns(sol, grid):
    """Cell-centred fields and pointwise residuals, as the CSV columns."""
    x = grid.points()
    f = sol.sample(x)
    residuals = verify.residual_terms(sol, x)
    return {'x': x[:, 0], 'y': x[:, 1], 'rho': f.rho, 'ux': f.u[:, 0], 'uy': f.u[:, 1], 's': f.s, 'pi': f.pi,
            'res_mass': residuals['mass'][0], 'res_momx': residuals['momx'][0],
            'res_momy': residuals['momy'][0], 'res_entropy': residuals['entropy'][0]}


def cmd_export(config, out_dir):
    base, sol = build_solution(config)
    if sol.dim != 2:
        raise VerificationFailure("field export writes planar solutions only")
    grid = residual_grid(config, sol)
    columns = export_columns(sol, grid)
    written = []
    if config.outputs.csv:
        path = os.path.join(out_dir, config.outputs.csv)
        fileio.write_fields_csv(path, columns)
        written.append(path)
    if config.outputs.vtk:
        path = os.path.join(out_dir, config.outputs.vtk)
        shape = grid.dims

        def field(name):
            return columns[name].reshape(shape)

        scalars = {name: field(name) for name in ('rho', 's', 'pi', 'res_mass', 'res_entropy')}
        vectors = {'u': np.stack([field('ux'), field('uy')], axis=-1),
                   'res_mom': np.stack([field('res_momx'), field('res_momy')], axis=-1)}
        fileio.write_fields_vtk(path, 'steady_euler fields seed=%d' % config.seed, shape, grid.origin, grid.h,
                                scalars, vectors)
        written.append(path)
    for path in written:
        logger.info("wrote %s" % path)
    return written


def _write_report(config, out_dir, command, document):
    name = config.outputs.json or "%s.json" % command
    fileio.write_json(os.path.join(out_dir, name), to_builtin(document))


def _print_gates(gates):
    for name, passed in sorted(gates.items()):
        logger.logkv("gate_%s" % name, "pass" if passed else "FAIL")
    logger.dumpkvs()


HANDLERS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "converge": cmd_converge,
    "evolve": cmd_evolve,
    "export": cmd_export,
}


def make_parser():
    parser = argparse.ArgumentParser(
        prog="steady-euler", allow_abbrev=False,
        description="Build and check compactly supported steady solutions of the compressible Euler system.",
        epilog="Any configuration leaf may be overridden as --section.field=value, e.g. --eos.gamma=2")
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('-c', '--config', default=None, help="JSON configuration document")
    parser.add_argument('-s', '--seed', default=None, type=int)
    parser.add_argument('-o', '--out', default=None, help="output directory (default runs/<run name>)")
    parser.add_argument('-q', '--quiet', action="store_true", help="warnings and errors only")
    return parser


def main(argv=None):
    parser = make_parser()
    args, extra = parser.parse_known_args(argv)
    overrides = [a for a in extra if a.startswith('--') and '=' in a]
    unknown = [a for a in extra if a not in overrides]
    if unknown:
        parser.error("unrecognized arguments: %s" % " ".join(unknown))

    try:
        config = load_config(args.config, overrides, seed=args.seed)
        out_dir = args.out or os.path.join('runs', run_name(args.command, config))
        os.makedirs(out_dir, exist_ok=True)
        with logger.session(out_dir):
            if args.quiet:
                logger.set_level(logger.WARN)
            HANDLERS[args.command](config, out_dir)
    except SteadyEulerError as e:
        logger.error("%s: %s" % (type(e).__name__, e))
        return e.exit_code
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
