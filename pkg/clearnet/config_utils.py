import json
import logging
import os
from dataclasses import dataclass, replace

import numpy as np

from .discrete_clearing import DiscreteSchedule
from .network_core import FinancialNetwork, ValidationError, validate_liabilities, validate_vector
from .processes import BrownianBridge, cashflow_from_json, net_position, schedule_from_json
from .static_clearing import StaticProblem


LOGGER = logging.getLogger()

default_dt = float(os.environ.get('CLEARNET_DT', '0.001'))
default_seed = int(os.environ.get('CLEARNET_SEED', '0'))
default_paths = int(os.environ.get('CLEARNET_PATHS', '2000'))


def load_config(file):
    try:
        with open(file, 'r') as f:
            document = json.load(f)
    except FileNotFoundError:
        raise ValidationError('Config file "{}" not found'.format(file))
    except json.JSONDecodeError as ex:
        raise ValidationError('Config file "{}" is not valid JSON: {}'.format(file, ex))
    if not isinstance(document, dict):
        raise ValidationError('$ must be an object')
    return document


def _number(document, key, default, cast=float):
    value = document.get(key, default)
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise ValidationError('$.{} must be a number, got {!r}'.format(key, value))


def initial_wealth(document, network):
    block = document['network']
    if 'V0' in block:
        return validate_vector(block['V0'], network.size, '$.network.V0', nonnegative=True)
    if 'x' in document:
        return validate_vector(document['x'], network.size, '$.x', nonnegative=True)
    raise ValidationError('$.network.V0 is required')


def problem_from_json(document):
    """Static clearing problem: external assets $.x (or $.network.V0) and $.network.L."""
    if 'network' not in document:
        raise ValidationError('$.network is required')
    network = FinancialNetwork.from_json(document['network'])
    if 'x' in document:
        x = validate_vector(document['x'], network.size, '$.x', nonnegative=True)
    else:
        x = initial_wealth(document, network)
    return network, StaticProblem(x=x, L=network.L)


def discrete_schedule_from_json(document):
    """Per-date schedule from $.discrete, or the single date reproducing the static problem."""
    if 'discrete' not in document:
        network, problem = problem_from_json(document)
        return network, DiscreteSchedule.from_static(problem.x, problem.L)
    if 'network' not in document:
        raise ValidationError('$.network is required')
    network = FinancialNetwork.from_json(document['network'])
    block = document['discrete']
    size = network.size
    V_init = validate_vector(block.get('V_init', np.zeros(size)), size, '$.discrete.V_init', nonnegative=True)
    steps_c = block.get('c', ())
    steps_L = block.get('L', ())
    if len(steps_c) != len(steps_L):
        raise ValidationError('$.discrete.c and $.discrete.L must have the same number of dates')
    c = tuple(validate_vector(c_t, size, '$.discrete.c[{}]'.format(t)) for t, c_t in enumerate(steps_c))
    L = tuple(validate_liabilities(L_t, '$.discrete.L[{}]'.format(t)) for t, L_t in enumerate(steps_L))
    return network, DiscreteSchedule(V_init=V_init, c=c, L=L)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to simulate continuous clearing paths."""

    network: FinancialNetwork
    V0: np.ndarray
    cashflow: object
    schedule: object
    T: float = 1.0
    dt0: float = default_dt
    seed: int = default_seed
    n_paths: int = 1
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'V0', validate_vector(self.V0, self.network.size, 'V0', nonnegative=True))
        if self.T <= 0:
            raise ValidationError('T must be positive, got {}'.format(self.T))
        if self.dt0 <= 0:
            raise ValidationError('dt must be positive, got {}'.format(self.dt0))
        if self.n_paths < 1:
            raise ValidationError('paths must be at least 1, got {}'.format(self.n_paths))
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError('seed must be an unsigned 64-bit integer, got {}'.format(self.seed))
        if isinstance(self.cashflow, BrownianBridge) and self.T != 1.0:
            raise ValidationError('A Brownian bridge cash flow requires T = 1, got {}'.format(self.T))
        if self.schedule.size != self.network.size:
            raise ValidationError('Liability schedule must be {0}x{0}'.format(self.network.size))

    @classmethod
    def from_json(cls, document):
        """Parse a scenario document; missing dt, seed and paths fall back to the environment."""
        if 'network' not in document:
            raise ValidationError('$.network is required')
        network = FinancialNetwork.from_json(document['network'])
        V0 = initial_wealth(document, network)
        T = _number(document, 'T', 1.0)
        schedule = schedule_from_json(
            document.get('liabilities', {'type': 'constant'}), network.L, T, path='$.liabilities'
        )
        cashflow = cashflow_from_json(
            document.get('cashflow', {'type': 'bridge'}), network.size, net_position(network.L), schedule,
            path='$.cashflow'
        )
        return cls(
            network=network,
            V0=V0,
            cashflow=cashflow,
            schedule=schedule,
            T=T,
            dt0=_number(document, 'dt', default_dt),
            seed=_number(document, 'seed', default_seed, int),
            n_paths=_number(document, 'paths', default_paths, int),
            name=str(document.get('name', '')),
        )

    def with_overrides(self, **kwargs):
        """Copy with the given fields replaced; None leaves a field as parsed."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})
