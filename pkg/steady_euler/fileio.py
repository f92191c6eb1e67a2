"""
Plain-text file formats: sampled seed fields (CSV and legacy VTK
STRUCTURED_POINTS), exported solution fields, and JSON reports.

All floats are written with 17 significant digits so that re-reading a file
reproduces the written arrays bitwise.
"""

from dataclasses import dataclass
import json
import os

import numpy as np

from steady_euler.errors import IngestionError

FLOAT_FMT = '%.17g'

SEED_COLUMNS = (
    ['x', 'y', 'z', 'Ux', 'Uy', 'Uz']
    + ['dU%sd%s' % (i, j) for i in 'xyz' for j in 'xyz']
    + ['P', 'dPdx', 'dPdy', 'dPdz'])

FIELD_COLUMNS = ['x', 'y', 'rho', 'ux', 'uy', 's', 'pi', 'res_mass', 'res_momx', 'res_momy', 'res_entropy']


@dataclass
class SeedGrid(object):
    """Sampled 3D seed on a structured grid; arrays are indexed [ix, iy, iz, ...]."""
    origin: np.ndarray
    spacing: np.ndarray
    dims: tuple
    U: np.ndarray
    gradU: np.ndarray
    P: np.ndarray
    gradP: np.ndarray
    p_inf: float
    support_radius: float

    def axes(self):
        return tuple(self.origin[a] + self.spacing[a] * np.arange(self.dims[a]) for a in range(3))


def write_json(path, document):
    """Deterministic JSON: sorted keys, fixed indentation."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w') as f:
        json.dump(document, f, sort_keys=True, indent=2)
        f.write('\n')


# ================================================================
# Seed fields
# ================================================================

def sample_seed(base, origin, spacing, dims):
    """Sample a 2D base solution onto a 3D grid, extruded along x3 with U3 = 0."""
    origin = np.asarray(origin, dtype=float)
    spacing = np.asarray(spacing, dtype=float)
    axes = [origin[a] + spacing[a] * np.arange(dims[a]) for a in range(3)]
    X, Y = np.meshgrid(axes[0], axes[1], indexing='ij')
    plane = np.stack([X.ravel(), Y.ravel()], axis=1)

    U2 = base.velocity(plane)
    J2 = base.velocity_jacobian(plane)
    P2 = base.pressure(plane)
    G2 = base.pressure_gradient(plane)

    nx, ny, nz = dims
    U = np.zeros((nx * ny, 3))
    U[:, :2] = U2
    gradU = np.zeros((nx * ny, 3, 3))
    gradU[:, :2, :2] = J2
    gradP = np.zeros((nx * ny, 3))
    gradP[:, :2] = G2

    def extrude(a):
        a = a.reshape((nx, ny) + a.shape[1:])
        return np.repeat(a[:, :, None], nz, axis=2)

    return SeedGrid(origin=origin, spacing=spacing, dims=tuple(dims),
                    U=extrude(U), gradU=extrude(gradU), P=extrude(P2), gradP=extrude(gradP),
                    p_inf=float(base.p_inf), support_radius=float(base.support_radius))


def _seed_rows(seed):
    X, Y, Z = np.meshgrid(*seed.axes(), indexing='ij')
    n = X.size
    return np.column_stack([
        X.ravel(), Y.ravel(), Z.ravel(),
        seed.U.reshape(n, 3),
        seed.gradU.reshape(n, 9),
        seed.P.reshape(n),
        seed.gradP.reshape(n, 3)])


def write_seed_csv(path, seed):
    header = '# p_inf=%s\n# support_radius=%s\n%s' % (
        FLOAT_FMT % seed.p_inf, FLOAT_FMT % seed.support_radius, ','.join(SEED_COLUMNS))
    np.savetxt(path, _seed_rows(seed), fmt=FLOAT_FMT, delimiter=',', header=header, comments='')


def read_seed_csv(path):
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise IngestionError("cannot read seed file %s: %s" % (path, e))

    meta = {}
    body_start = len(lines)
    for i, line in enumerate(lines):
        if not line.startswith('#'):
            body_start = i
            break
        key, sep, value = line[1:].partition('=')
        if not sep:
            raise IngestionError("malformed metadata line %r in %s" % (line, path))
        meta[key.strip()] = value.strip()
    if body_start >= len(lines):
        raise IngestionError("seed file %s has no column header" % path)

    columns = [c.strip() for c in lines[body_start].split(',')]
    missing = [c for c in SEED_COLUMNS if c not in columns]
    if missing:
        raise IngestionError("seed file %s lacks columns %s" % (path, missing))
    try:
        table = np.loadtxt(lines[body_start + 1:], delimiter=',', ndmin=2)
    except ValueError as e:
        raise IngestionError("malformed numeric data in %s: %s" % (path, e))
    if table.shape[1] != len(columns):
        raise IngestionError("seed file %s: %d columns in header, %d in data" % (path, len(columns), table.shape[1]))
    col = {name: table[:, i] for i, name in enumerate(columns)}

    p_inf, support_radius = _required_meta(meta, path)
    coords = np.column_stack([col['x'], col['y'], col['z']])
    origin, spacing, dims, index = _structured_index(coords, path)

    def gather(names):
        values = np.column_stack([col[n] for n in names])
        out = np.empty(dims + (len(names),))
        out[index[:, 0], index[:, 1], index[:, 2]] = values
        return out

    return SeedGrid(
        origin=origin, spacing=spacing, dims=dims,
        U=gather(SEED_COLUMNS[3:6]),
        gradU=gather(SEED_COLUMNS[6:15]).reshape(dims + (3, 3)),
        P=gather(['P'])[..., 0],
        gradP=gather(SEED_COLUMNS[16:19]),
        p_inf=p_inf, support_radius=support_radius)


def _required_meta(meta, path):
    try:
        return float(meta['p_inf']), float(meta['support_radius'])
    except KeyError as e:
        raise IngestionError("seed file %s lacks metadata key %s" % (path, e))
    except ValueError as e:
        raise IngestionError("seed file %s has non-numeric metadata: %s" % (path, e))


def _structured_index(coords, path):
    origin = np.empty(3)
    spacing = np.empty(3)
    dims = []
    index = np.empty(coords.shape, dtype=int)
    for a in range(3):
        levels = np.unique(coords[:, a])
        origin[a] = levels[0]
        if len(levels) == 1:
            spacing[a] = 1.0
        else:
            steps = np.diff(levels)
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise IngestionError("seed file %s: non-uniform spacing along axis %d" % (path, a))
            spacing[a] = steps[0]
        dims.append(len(levels))
        index[:, a] = np.searchsorted(levels, coords[:, a])
    dims = tuple(dims)
    if coords.shape[0] != np.prod(dims):
        raise IngestionError("seed file %s: %d rows do not fill a %s grid" % (path, coords.shape[0], dims))
    flat = np.ravel_multi_index(index.T, dims)
    if np.unique(flat).size != flat.size:
        raise IngestionError("seed file %s: duplicate grid nodes" % path)
    return origin, spacing, dims, index


# ================================================================
# Legacy VTK
# ================================================================

def _vtk_header(title, dims, origin, spacing):
    return [
        '# vtk DataFile Version 3.0',
        title,
        'ASCII',
        'DATASET STRUCTURED_POINTS',
        'DIMENSIONS %d %d %d' % tuple(dims),
        'ORIGIN %s %s %s' % tuple(FLOAT_FMT % v for v in origin),
        'SPACING %s %s %s' % tuple(FLOAT_FMT % v for v in spacing),
        'POINT_DATA %d' % int(np.prod(dims)),
    ]


def _vtk_order(a, dims):
    """[ix, iy, iz, ...] -> rows with x varying fastest."""
    n = int(np.prod(dims))
    return np.transpose(a, (2, 1, 0) + tuple(range(3, a.ndim))).reshape((n, -1))


def _vtk_block(lines, kind, name, rows):
    if kind == 'SCALARS':
        lines.append('SCALARS %s double 1' % name)
        lines.append('LOOKUP_TABLE default')
    else:
        lines.append('%s %s double' % (kind, name))
    lines.extend(' '.join(FLOAT_FMT % v for v in row) for row in rows)


def write_seed_vtk(path, seed):
    title = 'steady_euler seed p_inf=%s support_radius=%s' % (FLOAT_FMT % seed.p_inf, FLOAT_FMT % seed.support_radius)
    lines = _vtk_header(title, seed.dims, seed.origin, seed.spacing)
    _vtk_block(lines, 'VECTORS', 'U', _vtk_order(seed.U, seed.dims))
    _vtk_block(lines, 'TENSORS', 'gradU', _vtk_order(seed.gradU.reshape(seed.dims + (9,)), seed.dims))
    _vtk_block(lines, 'SCALARS', 'P', _vtk_order(seed.P[..., None], seed.dims))
    _vtk_block(lines, 'VECTORS', 'gradP', _vtk_order(seed.gradP, seed.dims))
    with open(path, 'w') as f:
        f.write('\n'.join(lines) + '\n')


def _parse_vtk(path):
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise IngestionError("cannot read VTK file %s: %s" % (path, e))
    if len(lines) < 8 or not lines[0].startswith('# vtk DataFile Version'):
        raise IngestionError("%s is not a legacy VTK file (bad header)" % path)
    if lines[2].strip() != 'ASCII' or lines[3].split() != ['DATASET', 'STRUCTURED_POINTS']:
        raise IngestionError("%s: only ASCII STRUCTURED_POINTS datasets are supported" % path)
    title = lines[1]
    tokens = ' '.join(lines[4:]).split()
    geometry = {}
    arrays = {}
    i = 0
    try:
        while i < len(tokens):
            key = tokens[i]
            if key in ('DIMENSIONS', 'ORIGIN', 'SPACING'):
                cast = int if key == 'DIMENSIONS' else float
                geometry[key] = tuple(cast(t) for t in tokens[i + 1:i + 4])
                i += 4
            elif key == 'POINT_DATA':
                geometry[key] = int(tokens[i + 1])
                i += 2
            elif key in ('SCALARS', 'VECTORS', 'TENSORS'):
                name = tokens[i + 1]
                i += 3
                width = {'VECTORS': 3, 'TENSORS': 9}.get(key, 1)
                if key == 'SCALARS':
                    if tokens[i] != 'LOOKUP_TABLE':
                        width = int(tokens[i])
                        i += 1
                    i += 2  # LOOKUP_TABLE default
                n = geometry['POINT_DATA']
                arrays[name] = np.array(tokens[i:i + n * width], dtype=float).reshape(n, width)
                i += n * width
            else:
                raise IngestionError("%s: unexpected keyword %r" % (path, key))
    except (KeyError, IndexError, ValueError) as e:
        if isinstance(e, IngestionError):
            raise
        raise IngestionError("%s: malformed VTK body (%s)" % (path, e))
    for key in ('DIMENSIONS', 'ORIGIN', 'SPACING', 'POINT_DATA'):
        if key not in geometry:
            raise IngestionError("%s: missing %s" % (path, key))
    return title, geometry, arrays


def read_seed_vtk(path):
    title, geometry, arrays = _parse_vtk(path)
    meta = dict(item.split('=', 1) for item in title.split() if '=' in item)
    p_inf, support_radius = _required_meta(meta, path)
    dims = geometry['DIMENSIONS']
    if int(np.prod(dims)) != geometry['POINT_DATA']:
        raise IngestionError("%s: POINT_DATA does not match DIMENSIONS" % path)
    for name in ('U', 'gradU', 'P', 'gradP'):
        if name not in arrays:
            raise IngestionError("%s: missing array %s" % (path, name))
    if min(geometry['SPACING']) <= 0.0:
        raise IngestionError("%s: spacing must be positive" % path)

    def unorder(rows):
        nx, ny, nz = dims
        return np.transpose(rows.reshape((nz, ny, nx, rows.shape[1])), (2, 1, 0, 3))

    return SeedGrid(
        origin=np.array(geometry['ORIGIN']), spacing=np.array(geometry['SPACING']), dims=tuple(dims),
        U=unorder(arrays['U']), gradU=unorder(arrays['gradU']).reshape(tuple(dims) + (3, 3)),
        P=unorder(arrays['P'])[..., 0], gradP=unorder(arrays['gradP']),
        p_inf=p_inf, support_radius=support_radius)


def read_seed(path):
    ext = os.path.splitext(path)[1].lower()
    if ext == '.csv':
        return read_seed_csv(path)
    elif ext == '.vtk':
        return read_seed_vtk(path)
    raise IngestionError("unknown seed file extension %r (expected .csv or .vtk)" % ext)


# ================================================================
# Solution field export
# ================================================================

def write_fields_csv(path, columns):
    """`columns` maps FIELD_COLUMNS names to equally long 1-D arrays."""
    table = np.column_stack([np.asarray(columns[name], dtype=float).ravel() for name in FIELD_COLUMNS])
    np.savetxt(path, table, fmt=FLOAT_FMT, delimiter=',', header=','.join(FIELD_COLUMNS), comments='')


def read_fields_csv(path):
    with open(path) as f:
        header = f.readline().strip().split(',')
    table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    return {name: table[:, i] for i, name in enumerate(header)}


def write_fields_vtk(path, title, dims, origin, spacing, scalars, vectors):
    """2D cell-centred fields as a single-layer STRUCTURED_POINTS dataset.

    `scalars` / `vectors` map names to arrays of shape (nx, ny) / (nx, ny, 2).
    """
    nx, ny = dims
    grid_dims = (nx, ny, 1)
    lines = _vtk_header(title, grid_dims, (origin[0], origin[1], 0.0), (spacing, spacing, spacing))
    for name, values in scalars.items():
        _vtk_block(lines, 'SCALARS', name, _vtk_order(np.asarray(values)[:, :, None, None], grid_dims))
    for name, values in vectors.items():
        padded = np.zeros((nx, ny, 1, 3))
        padded[:, :, 0, :2] = values
        _vtk_block(lines, 'VECTORS', name, _vtk_order(padded, grid_dims))
    with open(path, 'w') as f:
        f.write('\n'.join(lines) + '\n')
