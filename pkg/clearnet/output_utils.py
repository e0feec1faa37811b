import json
import logging
from pathlib import Path

import pandas as pd

from .network_core import ValidationError


LOGGER = logging.getLogger()


def output_dir(out):
    path = Path(out)
    if path.exists() and not path.is_dir():
        raise ValidationError('Output path "{}" is not a directory'.format(out))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _columns(prefix, size):
    return ['{}_{}'.format(prefix, i) for i in range(size)]


def static_frame(solution):
    return pd.DataFrame({
        'node': range(solution.V.shape[0]),
        'wealth': solution.V,
        'payment': solution.p,
        'default_order': solution.default_order,
    })


def trajectory_frame(trajectory, exposures=False):
    """
    One row per state: t, c_0..c_n (when tracked) and V_0..V_n. With `exposures`
    the relative exposures follow as a_i_j, flattened row-major.
    """
    size = trajectory[0].V.shape[0]
    tracked = hasattr(trajectory[0], 'c')
    rows = []
    for state in trajectory:
        row = [state.t] + (list(state.c) if tracked else []) + list(state.V)
        if exposures:
            row += list(state.A.ravel())
        rows.append(row)
    columns = ['t'] + (_columns('c', size) if tracked else []) + _columns('V', size)
    if exposures:
        columns += ['a_{}_{}'.format(i, j) for i in range(size) for j in range(size)]
    return pd.DataFrame(rows, columns=columns)


def events_frame(events):
    return pd.DataFrame(
        [(event.t, event.node, str(event.direction)) for event in events], columns=['t', 'node', 'direction']
    )


def write_frame(frame, out, name):
    path = output_dir(out) / name
    frame.to_csv(path, index=frame.index.name is not None, float_format='%.12g')
    LOGGER.info('Written {}'.format(path))
    return path


def write_json(data, out, name):
    path = output_dir(out) / name
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')
    LOGGER.info('Written {}'.format(path))
    return path
