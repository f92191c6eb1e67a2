import numpy as np
import pytest

from steady_euler import seed2d
from steady_euler import smoothfn
from steady_euler.errors import ConfigurationError
from steady_euler.seed2d import VortexSpec
from steady_euler.tests.helpers import rng
from steady_euler.verify import fit_order


def annular_spec(amplitude=1.0, p_inf=1.0):
    return VortexSpec(seed2d.vortex_shape("annular_bump", 1.0, 4.0, amplitude), p_inf)


def test_trivial_shape():
    base = seed2d.make_rankine(annular_spec(amplitude=0.0))
    assert base.trivial
    x = rng().uniform(-3.0, 3.0, size=(100, 2))
    assert np.all(base.velocity(x) == 0.0)
    assert np.all(base.pressure(x) == 1.0)
    assert np.all(base.pressure_gradient(x) == 0.0)
    assert base.p_min == base.p_inf


def test_indicator_shape_pressure():
    spec = VortexSpec(smoothfn.indicator(1.0, 4.0), 1.0)
    base = seed2d.make_rankine(spec)
    assert base.pressure(np.zeros(2))[0] == pytest.approx(1.0 - 1.5, abs=1e-10)
    assert base.radial_pressure(0.0) == pytest.approx(1.0 - 1.5, abs=1e-10)
    heavy = seed2d.make_inhomogeneous(smoothfn.constant(2.0), spec)
    assert heavy.pressure(np.zeros(2))[0] == pytest.approx(1.0 - 3.0, abs=1e-10)


def test_velocity_is_tangent_to_isobars():
    base = seed2d.make_rankine(annular_spec())
    x = rng().uniform(-2.5, 2.5, size=(2000, 2))
    u = base.velocity(x)
    grad = base.pressure_gradient(x)
    scale = np.max(np.abs(u)) * np.max(np.abs(grad))
    assert np.max(np.abs(np.sum(u * grad, axis=1))) <= 1e-14 * scale
    jac = base.velocity_jacobian(x)
    assert np.all(jac[:, 0, 0] + jac[:, 1, 1] == 0.0)


def test_momentum_balance():
    base = seed2d.make_rankine(annular_spec(amplitude=2.0))
    x = rng().uniform(-2.5, 2.5, size=(2000, 2))
    residual = seed2d.momentum_residual_base(base, x)
    assert np.max(np.abs(residual)) <= 1e-12 * max(1.0, np.max(np.abs(base.pressure_gradient(x))))


def test_far_field_is_exact():
    base = seed2d.make_rankine(annular_spec(p_inf=3.0))
    angle = rng().uniform(0.0, 2.0 * np.pi, 500)
    radius = rng(7).uniform(base.support_radius, 3.0 * base.support_radius, 500)
    x = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
    assert np.all(base.velocity(x) == 0.0)
    assert np.all(base.pressure(x) == 3.0)
    assert np.all(base.pressure_gradient(x) == 0.0)
    assert base.support_radius == 2.0 and base.inner_radius == 1.0


def test_pressure_is_radially_monotone():
    base = seed2d.make_rankine(annular_spec())
    r = np.linspace(0.0, 3.0, 5001)
    p = base.pressure_of_radius(r)
    assert np.all(np.diff(p) >= -1e-13)
    assert p[0] == base.p_min < base.p_inf
    assert np.all(p[r <= 1.0] == p[0])


def test_pressure_gradient_matches_finite_differences():
    base = seed2d.make_rankine(annular_spec())
    angle = rng().uniform(0.0, 2.0 * np.pi, 200)
    radius = rng(3).uniform(1.1, 1.9, 200)
    x = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
    exact = base.pressure_gradient(x)
    steps = (1e-2, 5e-3, 2.5e-3)
    errors = []
    for h in steps:
        fd = np.empty_like(x)
        for i in range(2):
            shift = np.zeros(2)
            shift[i] = h
            fd[:, i] = (base.pressure(x + shift) - base.pressure(x - shift)) / (2.0 * h)
        errors.append(np.max(np.abs(fd - exact)))
    assert 1.7 <= fit_order(steps, errors) <= 2.3


def test_radial_pressure_matches_table():
    base = seed2d.make_rankine(annular_spec())
    for r in (0.0, 1.2, 1.5, 1.9, 2.5):
        assert base.radial_pressure(r) == pytest.approx(base.pressure_of_radius(np.array([r]))[0], abs=1e-9)


def test_unit_density_reproduces_the_vortex():
    spec = annular_spec()
    plain = seed2d.make_rankine(spec)
    weighted = seed2d.make_inhomogeneous(smoothfn.constant(1.0), spec)
    x = rng().uniform(-2.5, 2.5, size=(500, 2))
    assert np.array_equal(plain.pressure(x), weighted.pressure(x))
    assert np.array_equal(plain.pressure_gradient(x), weighted.pressure_gradient(x))
    assert np.all(weighted.density(x) == 1.0)


def test_radial_density_balance():
    rho = smoothfn.polynomial([1.0, 0.0, 1.0])
    base = seed2d.make_inhomogeneous(rho, annular_spec())
    x = rng().uniform(-2.5, 2.5, size=(2000, 2))
    residual = seed2d.momentum_residual_base(base, x)
    assert np.max(np.abs(residual)) <= 1e-12 * max(1.0, np.max(np.abs(base.pressure_gradient(x))))
    r = np.hypot(x[:, 0], x[:, 1])
    assert np.allclose(base.density_gradient(x), 2.0 * x, rtol=1e-13, atol=0.0)
    assert np.allclose(base.density(x), 1.0 + r ** 2, rtol=1e-14, atol=0.0)


def test_preconditions():
    centred = VortexSpec(seed2d.vortex_shape("bump", 0.0, 4.0, 1.0), 1.0)
    with pytest.raises(ConfigurationError):
        seed2d.make_inhomogeneous(smoothfn.polynomial([1.0, 0.0, 1.0]), centred)
    with pytest.raises(ConfigurationError):
        seed2d.make_inhomogeneous(smoothfn.constant(-1.0), centred)
    with pytest.raises(ConfigurationError):
        VortexSpec(smoothfn.constant(1.0), 1.0)
    with pytest.raises(ConfigurationError):
        VortexSpec(smoothfn.bump(1.0, 4.0), float('inf'))
    with pytest.raises(ConfigurationError):
        seed2d.vortex_shape("spiral", 1.0, 4.0, 1.0)
    with pytest.raises(ConfigurationError):
        seed2d.vortex_shape("annular_bump", -1.0, 4.0, 1.0)


def test_centred_bump_has_no_core():
    base = seed2d.make_rankine(VortexSpec(seed2d.vortex_shape("bump", 0.0, 4.0, 1.0), 1.0))
    assert base.inner_radius == 0.0
    assert base.support_radius == 2.0
    assert base.pressure(np.zeros(2))[0] == base.p_min


if __name__ == '__main__':
    test_trivial_shape()
    test_indicator_shape_pressure()
    test_velocity_is_tangent_to_isobars()
    test_momentum_balance()
    test_far_field_is_exact()
    test_pressure_is_radially_monotone()
    test_pressure_gradient_matches_finite_differences()
    test_radial_pressure_matches_table()
    test_unit_density_reproduces_the_vortex()
    test_radial_density_balance()
    test_preconditions()
    test_centred_bump_has_no_core()
