"""
Run configuration: a tree of frozen dataclasses, read from one JSON document
and then patched leaf by leaf with dotted overrides (``eos.gamma=2``).

The defaults are the reference run: gamma-law gas with gamma 1.4, an annular
bump vortex on 1 <= |x|^2 <= 4, far-field density 1 and entropy 0.
"""

from dataclasses import asdict, dataclass, field, fields, is_dataclass
import json
import math
from typing import Optional

from steady_euler.errors import ConfigurationError

DIRECTIONS = ("profile_first", "psi_first")
SHAPES = ("bump", "annular_bump")


def _fail(name, message, value):
    raise ConfigurationError("%s %s, got %r" % (name, message, value))


def _finite(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        _fail(name, "must be a finite number", value)


def _positive(name, value):
    _finite(name, value)
    if value <= 0:
        _fail(name, "must be > 0", value)


def _count(name, value, minimum):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        _fail(name, "must be an integer >= %d" % minimum, value)


@dataclass(frozen=True)
class EosConfig(object):
    gamma: float = 1.4
    a: float = 1.0

    def __post_init__(self):
        _finite("eos.gamma", self.gamma)
        if self.gamma <= 1.0:
            _fail("eos.gamma", "must be > 1", self.gamma)
        _positive("eos.a", self.a)


@dataclass(frozen=True)
class VortexConfig(object):
    shape: str = "annular_bump"
    t1: float = 1.0
    t2: float = 4.0
    amplitude: float = 1.0
    p_inf: float = 1.0

    def __post_init__(self):
        if self.shape not in SHAPES:
            _fail("vortex.shape", "must be one of %s" % (SHAPES,), self.shape)
        for name in ("t1", "t2", "amplitude", "p_inf"):
            _finite("vortex." + name, getattr(self, name))
        if self.t2 <= 0:
            _fail("vortex.t2", "must be > 0", self.t2)
        if self.shape == "annular_bump" and not 0 <= self.t1 < self.t2:
            _fail("vortex.t1", "must satisfy 0 <= t1 < t2 for an annular bump", self.t1)


@dataclass(frozen=True)
class RampConfig(object):
    direction: str = "profile_first"
    rho_inf: Optional[float] = 1.0
    s_inf: float = 0.0
    rho_0: Optional[float] = 0.8
    s_0: float = -0.1
    b: Optional[float] = None  # None: the base solution's p_min
    psi_amplitude: float = 1.0
    ode_step: float = 1e-4
    shoot_tol: float = 1e-10

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            _fail("ramps.direction", "must be one of %s" % (DIRECTIONS,), self.direction)
        for name in ("rho_inf", "rho_0"):
            if getattr(self, name) is not None:
                _positive("ramps." + name, getattr(self, name))
        for name in ("s_inf", "s_0"):
            _finite("ramps." + name, getattr(self, name))
        if self.b is not None:
            _finite("ramps.b", self.b)
        _positive("ramps.psi_amplitude", self.psi_amplitude)
        _positive("ramps.ode_step", self.ode_step)
        _positive("ramps.shoot_tol", self.shoot_tol)
        if self.s_0 > self.s_inf:
            _fail("ramps.s_0", "must not exceed ramps.s_inf=%r" % self.s_inf, self.s_0)
        if self.direction == "profile_first":
            if self.rho_0 is None or self.rho_inf is None:
                _fail("ramps.rho_0", "and ramps.rho_inf are both required for profile_first", self.rho_0)
            if self.rho_0 > self.rho_inf:
                _fail("ramps.rho_0", "must not exceed ramps.rho_inf=%r" % self.rho_inf, self.rho_0)
        elif (self.rho_0 is None) == (self.rho_inf is None):
            _fail("ramps.rho_0", "or ramps.rho_inf (the shooting target) must be given, not both, for psi_first",
                  (self.rho_0, self.rho_inf))


@dataclass(frozen=True)
class GridConfig(object):
    h: float = 1.0 / 32.0
    margin: int = 8
    refinements: int = 3

    def __post_init__(self):
        _positive("grid.h", self.h)
        _count("grid.margin", self.margin, 4)
        _count("grid.refinements", self.refinements, 2)


@dataclass(frozen=True)
class EvolveConfig(object):
    t_end: float = 1.0
    cfl: float = 0.45
    record_every: float = 0.25
    margin: int = 0

    def __post_init__(self):
        _positive("evolve.t_end", self.t_end)
        _positive("evolve.cfl", self.cfl)
        if self.cfl > 0.9:
            _fail("evolve.cfl", "must be <= 0.9", self.cfl)
        _positive("evolve.record_every", self.record_every)
        _count("evolve.margin", self.margin, 0)


@dataclass(frozen=True)
class OutputConfig(object):
    csv: Optional[str] = "fields.csv"
    vtk: Optional[str] = "fields.vtk"
    json: Optional[str] = None  # None: <command>.json

    def __post_init__(self):
        for name in ("csv", "vtk", "json"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, str):
                _fail("outputs." + name, "must be a path string or null", value)


@dataclass(frozen=True)
class RunConfig(object):
    eos: EosConfig = field(default_factory=EosConfig)
    vortex: VortexConfig = field(default_factory=VortexConfig)
    ramps: RampConfig = field(default_factory=RampConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    evolve: EvolveConfig = field(default_factory=EvolveConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    seed3d_file: Optional[str] = None
    quad_tol: float = 1e-10
    samples: int = 10000
    seed: int = 42

    def __post_init__(self):
        _positive("quad_tol", self.quad_tol)
        _count("samples", self.samples, 1)
        _count("seed", self.seed, 0)
        if self.seed3d_file is not None and not isinstance(self.seed3d_file, str):
            _fail("seed3d_file", "must be a path string or null", self.seed3d_file)

    def to_dict(self):
        return asdict(self)


def _build(cls, data, prefix=""):
    if not isinstance(data, dict):
        _fail(prefix.rstrip(".") or "config", "must be a JSON object", data)
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigurationError("unknown configuration key %s%s" % (prefix, unknown[0]))
    kwargs = {}
    for name, value in data.items():
        default = known[name].default_factory() if callable(known[name].default_factory) else None
        if is_dataclass(default):
            value = _build(type(default), value, prefix + name + ".")
        kwargs[name] = value
    return cls(**kwargs)


def _merge(tree, patch, prefix=""):
    for key, value in patch.items():
        if key not in tree:
            raise ConfigurationError("unknown configuration key %s%s" % (prefix, key))
        if isinstance(tree[key], dict):
            if not isinstance(value, dict):
                _fail(prefix + key, "must be a JSON object", value)
            _merge(tree[key], value, prefix + key + ".")
        else:
            tree[key] = value


def parse_override(text):
    """'eos.gamma=2' -> (['eos', 'gamma'], 2); values are JSON, else plain strings."""
    if text.startswith("--"):
        text = text[2:]
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigurationError("override %r must look like section.field=value" % text)
    try:
        value = json.loads(raw)
    except ValueError:
        value = raw
    return key.split("."), value


def apply_override(tree, path, value):
    node = tree
    for i, part in enumerate(path[:-1]):
        if not isinstance(node.get(part), dict):
            raise ConfigurationError("unknown configuration key %s" % ".".join(path[:i + 1]))
        node = node[part]
    if path[-1] not in node or isinstance(node[path[-1]], dict):
        raise ConfigurationError("unknown configuration key %s" % ".".join(path))
    node[path[-1]] = value


def load_config(path=None, overrides=(), seed=None):
    tree = RunConfig().to_dict()
    if path is not None:
        try:
            with open(path) as f:
                document = json.load(f)
        except OSError as e:
            raise ConfigurationError("cannot read config %s: %s" % (path, e))
        except ValueError as e:
            raise ConfigurationError("config %s is not valid JSON: %s" % (path, e))
        if not isinstance(document, dict):
            _fail("config", "must be a JSON object", document)
        _merge(tree, document)
    for text in overrides:
        apply_override(tree, *parse_override(text))
    if seed is not None:
        tree["seed"] = seed
    return _build(RunConfig, tree)
