import re

import numpy as np


def slugify(value):
    """
    Normalizes string, converts to lowercase, removes non-alpha characters,
    and converts spaces to hyphens.
    """
    value = str(value)
    value = re.sub(r'[^\w\s.-]', '', value).strip().lower()
    value = re.sub(r'[-\s]+', '-', value)
    return value


def run_name(command, config):
    """Deterministic run label, e.g. 'construct-annular_bump-profile_first-seed42'."""
    return slugify("%s %s %s seed%d" % (command, config.vortex.shape, config.ramps.direction, config.seed))


def to_builtin(value):
    """numpy scalars/arrays and nan into JSON-safe Python values (nan -> None)."""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value
