import math

import numpy as np
import pytest

from steady_euler import lift
from steady_euler import seed2d
from steady_euler import smoothfn
from steady_euler import verify
from steady_euler.errors import ConfigurationError
from steady_euler.tests import helpers
from steady_euler.verify import Grid2D


def inhomogeneous_solution():
    spec = seed2d.VortexSpec(seed2d.vortex_shape("annular_bump", 1.0, 4.0, 1.0), 1.0)
    base = seed2d.make_inhomogeneous(smoothfn.polynomial([1.0, 0.0, 1.0]), spec)
    return lift.lift_inhomogeneous(base)


def test_grid_layout():
    grid = Grid2D.covering(2.0, 1.0 / 32, 8)
    assert grid.dims == (145, 145)
    assert grid.origin == (-2.25, -2.25)
    fine = grid.refined(2)
    assert fine.h == 1.0 / 64 and fine.dims == (289, 289) and fine.origin == grid.origin
    x, y = fine.axes()
    assert x[-1] == pytest.approx(2.25, abs=1e-12)
    assert grid.points().shape == (145 * 145, 2)
    with pytest.raises(ConfigurationError):
        Grid2D((0.0, 0.0), 0.0, (3, 3))


def test_fd_of_constant_state_is_zero():
    _, sol = helpers.constant_solution()
    grid = Grid2D.covering(1.0, 1.0 / 16, 4)
    for order in (2, 4):
        report = verify.residual_fd(sol, grid, order)
        assert all(norms['linf'] == 0.0 for norms in report.equations.values())


def test_fd_rejects_bad_input():
    _, sol = helpers.default_solution()
    with pytest.raises(ConfigurationError):
        verify.residual_fd(sol, Grid2D((0.0, 0.0), 0.1, (9, 9)), order=3)
    with pytest.raises(ConfigurationError):
        verify.residual_fd(sol, Grid2D((0.0, 0.0), 0.1, (4, 4)), order=4)


def test_second_order_convergence():
    _, sol = helpers.default_solution()
    table = verify.fd_convergence(sol, Grid2D.covering(sol.support_radius, 1.0 / 32, 8), levels=3, order=2)
    assert table.hs == [1.0 / 32, 1.0 / 64, 1.0 / 128]
    for name, order in table.orders.items():
        assert 1.7 <= order <= 2.3, (name, order)
    assert set(table.to_json()['fitted_order']) == set(verify.equation_names(2))


def test_fourth_order_convergence():
    _, sol = helpers.default_solution()
    table = verify.fd_convergence(sol, Grid2D.covering(sol.support_radius, 1.0 / 64, 8), levels=3, order=4)
    for name, order in table.orders.items():
        assert 3.5 <= order <= 4.5, (name, order)


def test_analytic_residuals_are_round_off():
    _, sol = helpers.default_solution()
    points = verify.random_points(sol, rng=helpers.rng())
    report = verify.residual_analytic(sol, points)
    assert report.points == verify.DEFAULT_SAMPLES
    assert report.passes(verify.ANALYTIC_TOL)
    for name in ('mass', 'entropy'):
        assert report.scales[name] >= 1.0
        assert report.linf(name) <= 1e-12 * report.scales[name]
    fd = verify.residual_fd(sol, Grid2D.covering(sol.support_radius, 1.0 / 32, 8))
    for name in verify.equation_names(2):
        assert fd.linf(name) > report.linf(name)


def test_analytic_residuals_of_other_solutions():
    points = helpers.rng().uniform(-2.5, 2.5, size=(2000, 2))
    for sol in (helpers.constant_solution()[1], helpers.isentropic_solution(), inhomogeneous_solution()):
        assert verify.residual_analytic(sol, points).passes(verify.ANALYTIC_TOL)


def test_corruptions_are_detected():
    _, sol = helpers.default_solution()
    points = verify.random_points(sol, n=2000, rng=helpers.rng())
    for kind in verify.CORRUPTIONS:
        report = verify.residual_analytic(verify.corrupt(sol, kind), points)
        assert not report.passes(verify.ANALYTIC_TOL), kind
    offset = verify.residual_analytic(verify.corrupt(sol, "density_offset"), points)
    assert offset.linf('momx') > 1e-3 * offset.scales['momx']
    scaled = verify.residual_analytic(verify.corrupt(sol, "velocity_scale"), points)
    assert scaled.linf('mass') <= verify.ANALYTIC_TOL * scaled.scales['mass']


def test_corruptions_break_second_order_convergence():
    _, sol = helpers.default_solution()
    grid = Grid2D.covering(sol.support_radius, 1.0 / 32, 8)
    for kind in verify.CORRUPTIONS:
        table = verify.fd_convergence(verify.corrupt(sol, kind), grid, levels=3, order=2)
        order = table.orders['momx']
        assert not 1.7 <= order <= 2.3, (kind, order)
        assert table.reports[-1].linf('momx') > 0.1 * table.reports[0].linf('momx'), kind


def test_corruption_preconditions():
    _, sol = helpers.default_solution()
    with pytest.raises(ConfigurationError):
        verify.corrupt(sol, "density_flip")
    with pytest.raises(ConfigurationError):
        verify.corrupt(inhomogeneous_solution(), "entropy_flip")


def test_virial_identity():
    _, sol = helpers.default_solution()
    report = verify.virial_check(sol)
    assert report.passes()
    assert report.kinetic > 0.0 and report.pressure_deficit < 0.0
    assert report.identity_residual <= verify.VIRIAL_TOL * report.bound
    assert verify.virial_check(inhomogeneous_solution()).passes()
    assert verify.virial_check(helpers.second_solution()).passes()


def test_virial_of_constant_and_corrupted_states():
    _, constant = helpers.constant_solution()
    report = verify.virial_check(constant)
    assert report.trivial and report.passes()
    assert report.to_json()['identity_residual'] == 0.0
    _, sol = helpers.default_solution()
    assert not verify.virial_check(verify.corrupt(sol, "velocity_scale")).passes()


def test_far_field_check():
    _, sol = helpers.default_solution()
    report = verify.farfield_check(sol, sol.support_radius, rng=helpers.rng())
    assert report.passed and report.violations == 0
    flipped = verify.farfield_check(verify.corrupt(sol, "entropy_flip"), sol.support_radius, rng=helpers.rng())
    assert not flipped.passed
    assert flipped.violations == flipped.samples
    assert len(flipped.first_violations) == 5


def test_pressure_deficit_check():
    base, _ = helpers.default_solution()
    report = verify.pressure_deficit_check(base, rng=helpers.rng())
    assert report.passed and not report.trivial
    assert report.center == [0.0, 0.0]
    assert 1.5 <= report.ball_radius <= base.support_radius
    constant_base, _ = helpers.constant_solution()
    trivial = verify.pressure_deficit_check(constant_base)
    assert trivial.trivial and trivial.passed and trivial.ball_radius == 0.0


def test_fit_order():
    hs = [0.1, 0.05, 0.025]
    assert verify.fit_order(hs, [3.0 * h ** 3 for h in hs]) == pytest.approx(3.0, abs=1e-12)
    assert math.isnan(verify.fit_order(hs, [1.0, 0.0, 1.0]))
    assert math.isnan(verify.fit_order([0.1], [1.0]))


def test_report_documents():
    _, sol = helpers.default_solution()
    points = verify.random_points(sol, n=100, rng=helpers.rng())
    document = verify.residual_analytic(sol, points).to_json()
    assert set(document) == {'method', 'grid', 'equations', 'scales', 'points', 'upstream_verified', 'seed'}
    assert document['method'] == 'analytic' and document['grid'] is None
    assert set(document['equations']['mass']) == {'linf', 'l2'}
    fd = verify.residual_fd(sol, Grid2D.covering(sol.support_radius, 1.0 / 16, 4)).to_json()
    assert fd['method'] == 'fd2' and set(fd['grid']) == {'origin', 'h', 'dims'}


if __name__ == '__main__':
    test_grid_layout()
    test_fd_of_constant_state_is_zero()
    test_fd_rejects_bad_input()
    test_second_order_convergence()
    test_fourth_order_convergence()
    test_analytic_residuals_are_round_off()
    test_analytic_residuals_of_other_solutions()
    test_corruptions_are_detected()
    test_corruptions_break_second_order_convergence()
    test_corruption_preconditions()
    test_virial_identity()
    test_virial_of_constant_and_corrupted_states()
    test_far_field_check()
    test_pressure_deficit_check()
    test_fit_order()
    test_report_documents()
