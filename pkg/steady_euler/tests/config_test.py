import json
import os
import os.path as osp
import tempfile

import pytest

from steady_euler.config import RunConfig, load_config, parse_override
from steady_euler.errors import ConfigurationError

CONFIG_DIR = osp.join(osp.dirname(__file__), '..', '..', 'configs')


def write_config(directory, document):
    path = osp.join(directory, 'config.json')
    with open(path, 'w') as f:
        f.write(document if isinstance(document, str) else json.dumps(document))
    return path


def test_defaults():
    config = load_config()
    assert config == RunConfig()
    assert config.eos.gamma == 1.4 and config.eos.a == 1.0
    assert config.vortex.shape == "annular_bump" and (config.vortex.t1, config.vortex.t2) == (1.0, 4.0)
    assert config.ramps.b is None and config.ramps.rho_0 == 0.8 and config.ramps.s_0 == -0.1
    assert config.grid.h == 1.0 / 32 and config.grid.margin == 8 and config.grid.refinements == 3
    assert config.evolve.t_end == 1.0 and config.evolve.cfl == 0.45 and config.evolve.record_every == 0.25
    assert config.quad_tol == 1e-10 and config.samples == 10000 and config.seed == 42


def test_shipped_configs():
    assert load_config(osp.join(CONFIG_DIR, 'default.json')) == RunConfig()
    psi_first = load_config(osp.join(CONFIG_DIR, 'psi_first.json'))
    assert psi_first.ramps.direction == "psi_first"
    assert psi_first.ramps.rho_0 is None and psi_first.ramps.rho_inf == 1.0


def test_partial_document_and_overrides():
    with tempfile.TemporaryDirectory() as directory:
        path = write_config(directory, {'eos': {'gamma': 2.0}, 'grid': {'h': 0.0625}})
        config = load_config(path, ['--eos.a=0.5', '--vortex.shape="bump"', '--ramps.b=0.5'], seed=7)
    assert config.eos == type(config.eos)(gamma=2.0, a=0.5)
    assert config.grid.h == 0.0625 and config.grid.margin == 8
    assert config.vortex.shape == "bump"
    assert config.ramps.b == 0.5
    assert config.seed == 7


def test_override_values_are_json():
    assert parse_override('--ramps.rho_0=null') == (['ramps', 'rho_0'], None)
    assert parse_override('grid.margin=6') == (['grid', 'margin'], 6)
    assert parse_override('--vortex.shape=bump') == (['vortex', 'shape'], 'bump')
    with pytest.raises(ConfigurationError):
        parse_override('--eos.gamma')


def test_unknown_keys_name_the_field():
    with pytest.raises(ConfigurationError, match="eos.gama"):
        load_config(overrides=['--eos.gama=2'])
    with pytest.raises(ConfigurationError, match="solver"):
        load_config(overrides=['--solver.order=2'])
    with tempfile.TemporaryDirectory() as directory:
        path = write_config(directory, {'grid': {'spacing': 0.1}})
        with pytest.raises(ConfigurationError, match="grid.spacing"):
            load_config(path)


def test_range_errors_name_the_field():
    cases = [
        ('--eos.gamma=1.0', "eos.gamma"),
        ('--eos.a=0', "eos.a"),
        ('--vortex.shape="spiral"', "vortex.shape"),
        ('--vortex.t1=5', "vortex.t1"),
        ('--ramps.rho_0=1.5', "ramps.rho_0"),
        ('--ramps.s_0=0.5', "ramps.s_0"),
        ('--grid.margin=2', "grid.margin"),
        ('--grid.refinements=1', "grid.refinements"),
        ('--grid.h=-0.1', "grid.h"),
        ('--evolve.cfl=1.5', "evolve.cfl"),
        ('--evolve.t_end=0', "evolve.t_end"),
        ('--samples=0', "samples"),
    ]
    for override, name in cases:
        with pytest.raises(ConfigurationError, match=name.replace('.', r'\.')):
            load_config(overrides=[override])


def test_psi_first_needs_exactly_one_density():
    with pytest.raises(ConfigurationError):
        load_config(overrides=['--ramps.direction="psi_first"'])
    config = load_config(overrides=['--ramps.direction="psi_first"', '--ramps.rho_inf=null'])
    assert config.ramps.rho_0 == 0.8 and config.ramps.rho_inf is None
    with pytest.raises(ConfigurationError):
        load_config(overrides=['--ramps.rho_0=null'])


def test_malformed_documents():
    with tempfile.TemporaryDirectory() as directory:
        with pytest.raises(ConfigurationError):
            load_config(write_config(directory, "{not json"))
        with pytest.raises(ConfigurationError):
            load_config(write_config(directory, "[1, 2]"))
        with pytest.raises(ConfigurationError, match="eos"):
            load_config(write_config(directory, {'eos': 3}))
        with pytest.raises(ConfigurationError):
            load_config(osp.join(directory, 'missing.json'))


def test_config_round_trips_through_json():
    config = load_config(overrides=['--seed=3'])
    with tempfile.TemporaryDirectory() as directory:
        path = write_config(directory, config.to_dict())
        assert load_config(path) == config
        assert os.path.getsize(path) > 0


if __name__ == '__main__':
    test_defaults()
    test_shipped_configs()
    test_partial_document_and_overrides()
    test_override_values_are_json()
    test_unknown_keys_name_the_field()
    test_range_errors_name_the_field()
    test_psi_first_needs_exactly_one_density()
    test_malformed_documents()
    test_config_round_trips_through_json()
