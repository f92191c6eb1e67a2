import math

from hypothesis import given, settings
from hypothesis import strategies as st
import numpy as np
import pytest

from steady_euler import eos
from steady_euler import smoothfn
from steady_euler.eos import EosParams
from steady_euler.errors import ConfigurationError, DomainError
from steady_euler.verify import fit_order

AIR = EosParams(gamma=1.4, a=1.0)
QUADRATIC = EosParams(gamma=2.0, a=1.0)


def test_pressure_values():
    assert AIR.pressure(1.0, 0.0) == 1.0
    assert AIR.pressure(2.0, 0.0) == pytest.approx(2.0 ** 1.4, rel=1e-15)
    assert AIR.pressure(1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert AIR.pressure(0.0, 3.0) == 0.0
    with pytest.raises(DomainError):
        AIR.pressure(-1.0, 0.0)


def test_pressure_partials_values():
    assert QUADRATIC.pressure_partials(1.0, 0.0) == (2.0, 1.0)
    assert AIR.pressure_partials(1.0, 0.0) == (1.4, 1.0)
    with pytest.raises(DomainError):
        AIR.pressure_partials(0.0, 0.0)


def test_internal_energy_values():
    assert QUADRATIC.internal_energy(1.0, 0.0) == 1.0
    assert AIR.internal_energy(1.0, 0.0) == pytest.approx(2.5, rel=1e-15)
    assert AIR.internal_energy(2.0, 0.0) == pytest.approx(2.0 ** 1.4 / 0.8, rel=1e-15)
    with pytest.raises(DomainError):
        AIR.internal_energy(np.array([1.0, 0.0]), 0.0)


def test_parameters_are_validated():
    with pytest.raises(ConfigurationError):
        EosParams(gamma=1.0)
    with pytest.raises(ConfigurationError):
        EosParams(a=0.0)
    with pytest.raises(ConfigurationError):
        EosParams(gamma=float('nan'))


def test_partials_match_finite_differences():
    rho = np.linspace(0.5, 2.0, 11)
    s = np.linspace(-1.0, 1.0, 11)
    d_rho, d_s = AIR.pressure_partials(rho, s)
    steps = (1e-3, 5e-4, 2.5e-4)
    rho_err, s_err = [], []
    for h in steps:
        fd_rho = (AIR.pressure(rho + h, s) - AIR.pressure(rho - h, s)) / (2.0 * h)
        fd_s = (AIR.pressure(rho, s + h) - AIR.pressure(rho, s - h)) / (2.0 * h)
        rho_err.append(np.max(np.abs(fd_rho - d_rho)))
        s_err.append(np.max(np.abs(fd_s - d_s)))
    assert 1.7 <= fit_order(steps, rho_err) <= 2.3
    assert 1.7 <= fit_order(steps, s_err) <= 2.3


def test_positivity_on_grid():
    rho, s = np.meshgrid(np.geomspace(1e-3, 1e3, 100), np.linspace(-10.0, 10.0, 100))
    assert np.all(AIR.pressure(rho, s) > 0.0)
    d_rho, d_s = AIR.pressure_partials(rho, s)
    assert np.all(d_rho > 0.0) and np.all(d_s > 0.0)


def test_monotone_composition():
    rho_t = smoothfn.ramp(0.8, 1.0, 0.34, 1.0)
    s_t = smoothfn.ramp(-0.1, 0.0, 0.34, 1.0)
    z = np.linspace(0.0, 1.5, 2001)
    pi = AIR.pressure(rho_t(z), s_t(z))
    assert np.all(np.diff(pi) >= 0.0)


def test_energy_and_sound_speed():
    velocity = np.array([[3.0, 4.0]])
    assert eos.total_energy(AIR, np.array([2.0]), velocity, np.array([0.0]))[0] == pytest.approx(
        2.0 ** 1.4 / 0.4 + 25.0, rel=1e-15)
    assert AIR.sound_speed(1.0, 1.0) == pytest.approx(math.sqrt(1.4), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=-10.0, max_value=10.0))
def test_entropy_inverts_pressure(rho, s):
    pi = AIR.pressure(rho, s)
    assert AIR.entropy_from(rho, pi) == pytest.approx(s, abs=1e-12 * max(1.0, abs(s)) + 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=1.01, max_value=5.0), st.floats(min_value=0.1, max_value=3.0))
def test_partials_are_positive(gamma, a):
    params = EosParams(gamma=gamma, a=a)
    d_rho, d_s = params.pressure_partials(np.array([0.1, 1.0, 10.0]), np.array([-1.0, 0.0, 1.0]))
    assert np.all(d_rho > 0.0) and np.all(d_s > 0.0)


if __name__ == '__main__':
    test_pressure_values()
    test_pressure_partials_values()
    test_internal_energy_values()
    test_parameters_are_validated()
    test_partials_match_finite_differences()
    test_positivity_on_grid()
    test_monotone_composition()
    test_energy_and_sound_speed()
