"""Cached constructions shared by the test modules."""

from dataclasses import replace
from functools import lru_cache

import numpy as np

from steady_euler import cli
from steady_euler import lift
from steady_euler.config import RunConfig, VortexConfig
from steady_euler.eos import EosParams

SEED = 42


def rng(seed=SEED):
    return np.random.default_rng(seed)


@lru_cache(maxsize=None)
def default_eos():
    return EosParams()


@lru_cache(maxsize=None)
def default_solution():
    """(base, lifted) for the default configuration."""
    return cli.build_solution(RunConfig())


@lru_cache(maxsize=None)
def constant_solution():
    config = replace(RunConfig(), vortex=VortexConfig(amplitude=0.0))
    return cli.build_solution(config)


@lru_cache(maxsize=None)
def isentropic_solution():
    base, _ = default_solution()
    ramps = lift.isentropic_ramps(base.p_min, base.p_inf, 0.8, 1.0, 0.0)
    return lift.lift_solution(base, ramps, default_eos())


@lru_cache(maxsize=None)
def second_solution():
    """Same far field as the default, different ramps."""
    base, _ = default_solution()
    ramps = lift.make_ramps(base.p_min, base.p_inf, 0.6, 1.0, -0.3, 0.0)
    return lift.lift_solution(base, ramps, default_eos())
