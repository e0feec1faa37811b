"""
Monte-Carlo driver and regression suite for the clearing solvers.
"""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import pandas as pd

from . import scenarios
from .config_utils import ScenarioConfig, default_dt, default_seed
from .continuous_sim import simulate_path
from .discrete_clearing import run_discrete_dt
from .network_core import ClearnetError, PathError, relative_liabilities
from .processes import RngStream, net_position
from .static_clearing import clear_static, fictitious_default, picard_oracle
from .types import CrossingDirection, SuiteScenario


LOGGER = logging.getLogger()

__all__ = ('ScenarioConfig', 'McSummary', 'CheckResult', 'SuiteReport', 'run_monte_carlo', 'run_scenario_suite')

DEFAULT_TOLERANCE = 1e-9
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
# Banks ending within this band of zero wealth are neither solvent nor in default
ZERO_WEALTH_BAND = 5e-2

default_threads = int(os.environ.get('CLEARNET_THREADS', '1'))
# Upper bound on worker processes, None when CLEARNET_THREADS is unset
max_threads = int(os.environ['CLEARNET_THREADS']) if 'CLEARNET_THREADS' in os.environ else None

# Clearing intervals of the discrete-to-continuous convergence check
CONVERGENCE_STEPS = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True)
class McSummary:

    names: tuple
    samples: np.ndarray
    initial_wealth: np.ndarray
    rng: dict
    events: tuple = None
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def n_paths(self):
        return self.samples.shape[0]

    @property
    def default_frequency(self):
        """Per node: share of paths ending with V_i(T) < -tolerance."""
        return (self.samples < -self.tolerance).mean(axis=0)

    @property
    def societal_wealth(self):
        return self.samples[:, 0]

    @property
    def societal_payment(self):
        """Payments received by society over the horizon, V_0(T) - V_0(0)."""
        return self.samples[:, 0] - self.initial_wealth[0]

    def statistics(self, values):
        return {
            'mean': float(np.mean(values)),
            'min': float(np.min(values)),
            'max': float(np.max(values)),
            'quantiles': {'{:g}'.format(q * 100): float(np.quantile(values, q)) for q in QUANTILES},
        }

    def to_json(self):
        return {
            'paths': self.n_paths,
            'default_frequency': dict(zip(self.names, self.default_frequency.tolist())),
            'societal_wealth': self.statistics(self.societal_wealth),
            'societal_payment': self.statistics(self.societal_payment),
            'rng': self.rng,
        }

    def samples_frame(self):
        frame = pd.DataFrame(self.samples, columns=['V_{}'.format(i) for i in range(self.samples.shape[1])])
        frame.index.name = 'path'
        return frame


def _terminal(config, path_index, keep_events):
    try:
        result = simulate_path(config, config.seed, path_index, record=False)
    except ClearnetError as ex:
        raise PathError(path_index, ex)
    return result.terminal.V, (tuple(result.events) if keep_events else None)


def _run_path(arguments):
    return _terminal(*arguments)


def worker_count(threads=None):
    threads = default_threads if threads is None else threads
    if max_threads is not None and threads > max_threads:
        LOGGER.warning('{} workers requested, CLEARNET_THREADS caps the pool at {}'.format(threads, max_threads))
        return max_threads
    return threads


def run_monte_carlo(config, threads=None, keep_events=False):
    """
    Simulate config.n_paths independent paths, path i drawing from the stream
    (config.seed, i). Results are gathered in path order.
    """
    threads = worker_count(threads)
    arguments = [(config, i, keep_events) for i in range(config.n_paths)]
    LOGGER.info('Simulating {} paths of "{}" with dt {} on {} worker(s)'.format(
        config.n_paths, config.name or 'scenario', config.dt0, threads
    ))
    step = max(1, config.n_paths // 10)
    results = []
    if threads > 1 and config.n_paths > 1:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            for result in executor.map(_run_path, arguments, chunksize=step):
                results.append(result)
                if len(results) % step == 0:
                    LOGGER.info('{}/{} paths done'.format(len(results), config.n_paths))
    else:
        for argument in arguments:
            results.append(_run_path(argument))
            if len(results) % step == 0:
                LOGGER.info('{}/{} paths done'.format(len(results), config.n_paths))

    rng = dict(RngStream(config.seed).metadata(), paths=config.n_paths)
    del rng['path_index']
    return McSummary(
        names=config.network.names,
        samples=np.array([V for V, _ in results]),
        initial_wealth=config.V0,
        rng=rng,
        events=tuple(events for _, events in results) if keep_events else None,
    )


@dataclass(frozen=True)
class CheckResult:

    name: str
    passed: bool
    measured: object
    expected: str

    def __str__(self):
        return '[{}] {}: measured {}, expected {}'.format(
            'PASS' if self.passed else 'FAIL', self.name, self.measured, self.expected
        )


@dataclass
class SuiteReport:

    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def add(self, name, passed, measured, expected):
        check = CheckResult(name=name, passed=bool(passed), measured=measured, expected=expected)
        LOGGER.info(str(check))
        self.checks.append(check)
        return check


def _rounded(values, digits=4):
    return [round(float(v), digits) for v in values]


def check_static(report):
    solution = clear_static(scenarios.reference_problem())
    error = float(np.max(np.abs(solution.V - scenarios.REFERENCE_STATIC_WEALTH)))
    report.add('static wealths', error <= 0.01, _rounded(solution.V, 2), '±0.01 of {}'.format(
        scenarios.REFERENCE_STATIC_WEALTH.tolist()
    ))
    orders = [sorted(order) for order in solution.orders]
    report.add('static default orders', orders == [[1], [1, 2], [1, 2, 3]], orders, [[1], [1, 2], [1, 2, 3]])


def check_oracle(report):
    problem = scenarios.reference_problem()
    V = clear_static(problem).V
    greatest, least = picard_oracle(problem)
    gap = float(max(np.max(np.abs(V - greatest)), np.max(np.abs(V - least))))
    report.add('fictitious default matches payment iteration', gap <= 1e-8, gap, '<= 1e-08')


def check_conservation(report, dt):
    config = scenarios.constant_rates(dt0=dt)
    trajectory = run_discrete_dt(config.cashflow, config.schedule, config.V0, config.T, dt)
    inflow = net_position(config.schedule.L_bar).sum()
    gap = abs(float(np.maximum(trajectory[-1].V, 0.0).sum() - config.V0.sum() - inflow))
    report.add('discrete conservation of positive wealth', gap <= 1e-8, gap, '<= 1e-08')


def check_constant_rates(report, dt):
    result = simulate_path(scenarios.constant_rates(dt0=dt))
    V = result.terminal.V
    error = float(np.max(np.abs(V - clear_static(scenarios.reference_problem()).V)))
    report.add('constant rates: terminal equals static', error <= 5e-2, error, '<= 0.05')
    order = [event.node for event in result.events if event.direction is CrossingDirection.distress]
    recoveries = [event.node for event in result.events if event.direction is CrossingDirection.recovery]
    report.add(
        'constant rates: default order', order == [1, 2, 3] and not recoveries, order, '[1, 2, 3], no recoveries'
    )


def bridge_fixed_point_gap(result, config):
    """Distance of V(T) from the clearing wealths of the realized aggregate cash flow."""
    terminal = result.terminal
    L_bar = config.schedule.L_bar
    expected = fictitious_default(
        config.V0 + terminal.c, relative_liabilities(L_bar), config.network.n, L_bar.sum(axis=1)
    ).V
    return float(np.max(np.abs(terminal.V - expected)))


def check_path_independence(report, dt, seed):
    for vol in (1.0, 5.0):
        config = scenarios.constant_rates(vol=vol, dt0=dt, seed=seed)
        gap = bridge_fixed_point_gap(simulate_path(config), config)
        report.add('bridge vol {:g}: terminal solves aggregate clearing'.format(vol), gap <= 1e-6, gap, '<= 1e-06')


def check_convergence(report, dt):
    """Discrete clearing of the creditors-first schedule on shrinking grids against its continuous path."""
    config = scenarios.creditors_first(dt0=min(dt, CONVERGENCE_STEPS[-1] / 10))
    continuous = simulate_path(config, record=False).terminal.V
    errors = []
    for step in CONVERGENCE_STEPS:
        discrete = run_discrete_dt(config.cashflow, config.schedule, config.V0, config.T, step)[-1].V
        errors.append(float(np.max(np.abs(discrete - continuous))))
    decreasing = all(later < earlier for earlier, later in zip(errors, errors[1:]))
    report.add('discrete clearing approaches continuous', decreasing, _rounded(errors, 6),
               'decreasing over dt {}'.format(list(CONVERGENCE_STEPS)))



def check_creditors_first(report, dt):
    V = simulate_path(scenarios.creditors_first(dt0=dt)).terminal.V
    defaults = [i for i in range(1, V.shape[0]) if V[i] < -ZERO_WEALTH_BAND]
    report.add('creditors first: only bank 1 defaults', defaults == [1], defaults, [1])
    zero = float(max(abs(V[2]), abs(V[3])))
    report.add('creditors first: banks 2 and 3 end at zero', zero <= ZERO_WEALTH_BAND, _rounded(V),
               'V_2, V_3 within ±0.05 of 0')


def check_society_first(report, dt):
    V = simulate_path(scenarios.society_first(dt0=dt)).terminal.V
    defaults = [i for i in range(1, V.shape[0]) if V[i] < -DEFAULT_TOLERANCE]
    report.add('society first: every bank defaults, society solvent', defaults == [1, 2, 3, 4] and V[0] > 0,
               _rounded(V), 'V_1..V_4 < 0 < V_0')


def check_staggered_bridge(report, dt, seed, paths, threads=None):
    summary = run_monte_carlo(scenarios.staggered_bridge(dt0=dt, seed=seed, n_paths=paths), threads=threads)
    frequency = summary.default_frequency
    report.add('staggered bridge: bank 2 default frequency', 0.96 <= frequency[2] <= 1.0, frequency[2], '[0.96, 1]')
    report.add('staggered bridge: bank 3 default frequency', 0.01 <= frequency[3] <= 0.08, frequency[3],
               '[0.01, 0.08]')
    report.add('staggered bridge: bank 4 default frequency', frequency[4] <= 0.005, frequency[4], '<= 0.005')
    payment = summary.societal_payment
    overlap = payment.min() <= 10.20 and payment.max() >= 8.12
    report.add('staggered bridge: societal payment range', overlap,
               _rounded((payment.min(), payment.max()), 2), 'overlaps [8.12, 10.2]')


def check_properties(report, dt, seed, count=100):
    rng = np.random.default_rng(seed)
    failures = []
    for k in range(count):
        V = simulate_path(scenarios.random_window_scenario(rng, dt0=dt)).terminal.V
        if not (V[1] < -DEFAULT_TOLERANCE and V[0] > 0):
            failures.append(k)
    report.add('random schedules: bank 1 defaults, society solvent', not failures, failures, 'no failing schedules')


def run_scenario_suite(dt=None, paths=None, seed=None, only=None, threads=None):
    """Run the built-in regression scenarios; `only` restricts them to a set of SuiteScenario members."""
    dt = default_dt if dt is None else dt
    seed = default_seed if seed is None else seed
    paths = 2000 if paths is None else paths
    checks = (
        (SuiteScenario.static, check_static),
        (SuiteScenario.oracle, check_oracle),
        (SuiteScenario.conservation, partial(check_conservation, dt=dt)),
        (SuiteScenario.constant_rates, partial(check_constant_rates, dt=dt)),
        (SuiteScenario.path_independence, partial(check_path_independence, dt=dt, seed=seed)),
        (SuiteScenario.convergence, partial(check_convergence, dt=dt)),
        (SuiteScenario.creditors_first, partial(check_creditors_first, dt=dt)),
        (SuiteScenario.society_first, partial(check_society_first, dt=dt)),
        (SuiteScenario.staggered_bridge,
         partial(check_staggered_bridge, dt=dt, seed=seed, paths=paths, threads=threads)),
        (SuiteScenario.properties, partial(check_properties, dt=dt, seed=seed)),
    )
    report = SuiteReport()
    for scenario, check in checks:
        if only and scenario not in only:
            continue
        LOGGER.info('Running {}'.format(scenario))
        check(report)
    return report
