"""
Cash-flow processes, liability schedules and per-path random streams.

Cash flows follow dc = mu(t, c) dt + sigma(t, c) dW. Liabilities accrue
deterministically at a rate dL/dt which is piecewise constant between the
schedule's breakpoints. Windows are left-closed and right-open; endpoints are
a null set for every integral computed here.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .network_core import HorizonError, ValidationError, society_rates_floor, validate_liabilities


LOGGER = logging.getLogger()

BRIDGE_HORIZON_GUARD = 1e-9


@dataclass(frozen=True)
class ConstantRate:

    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'mu', np.asarray(self.mu, dtype=float))

    def coefficients(self, t, c):
        return self.mu, np.zeros((self.mu.shape[0], self.mu.shape[0]))


@dataclass(frozen=True)
class BrownianBridge:
    """Cash flow pinned to `target` at t = 1: dc = (target - c) / (1 - t) dt + vol dW."""

    target: np.ndarray
    vol: float

    def __post_init__(self):
        object.__setattr__(self, 'target', np.asarray(self.target, dtype=float))
        if self.vol < 0:
            raise ValidationError('Bridge volatility must be nonnegative, got {}'.format(self.vol))

    def coefficients(self, t, c):
        if t >= 1 - BRIDGE_HORIZON_GUARD:
            raise HorizonError('Brownian bridge drift is singular at t = {}'.format(t))
        size = self.target.shape[0]
        return (self.target - c) / (1 - t), self.vol * np.eye(size)


@dataclass(frozen=True)
class AffineDiffusion:

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'mu', np.asarray(self.mu, dtype=float))
        object.__setattr__(self, 'sigma', np.asarray(self.sigma, dtype=float))

    def coefficients(self, t, c):
        return self.mu, self.sigma


@dataclass(frozen=True)
class LiabilityNetFlow:
    """Deterministic cash flow matching the obligations as they accrue: dc = dL^T 1 - dL 1."""

    schedule: object

    def coefficients(self, t, c):
        rate = eval_liability_rate(self.schedule, t)
        return net_position(rate), np.zeros(rate.shape)


def eval_mu_sigma(cashflow, t, c):
    """Drift vector and diffusion matrix of the cash-flow process at (t, c)."""
    return cashflow.coefficients(t, np.asarray(c, dtype=float))


@dataclass(frozen=True)
class Window:

    rate: np.ndarray
    start: float
    end: float

    def __post_init__(self):
        object.__setattr__(self, 'rate', np.asarray(self.rate, dtype=float))

    def overlap(self, a, b):
        return max(0.0, min(self.end, b) - max(self.start, a))


@dataclass(frozen=True)
class ConstantLiabilityRate:
    """Liabilities L_bar accruing evenly over [0, T]."""

    L_bar: np.ndarray
    T: float

    def __post_init__(self):
        object.__setattr__(self, 'L_bar', validate_liabilities(self.L_bar, 'liabilities.L'))
        if self.T <= 0:
            raise ValidationError('Horizon T must be positive, got {}'.format(self.T))

    @property
    def size(self):
        return self.L_bar.shape[0]


@dataclass(frozen=True)
class PiecewiseWindows:

    windows: tuple

    def __post_init__(self):
        if not self.windows:
            raise ValidationError('A window schedule needs at least one window')
        size = self.windows[0].rate.shape[0]
        for k, window in enumerate(self.windows):
            path = 'liabilities.windows[{}]'.format(k)
            validate_liabilities(window.rate, '{}.rate'.format(path))
            if window.rate.shape[0] != size:
                raise ValidationError('{}.rate must be {}x{}'.format(path, size, size))
            if not window.start < window.end:
                raise ValidationError('{} must have start < end'.format(path))

    @property
    def size(self):
        return self.windows[0].rate.shape[0]


def eval_liability_rate(sched, t):
    """dL/dt at time t: the sum of the rates of all windows active at t."""
    if isinstance(sched, ConstantLiabilityRate):
        return sched.L_bar / sched.T
    rate = np.zeros((sched.size, sched.size))
    for window in sched.windows:
        if window.start <= t < window.end:
            rate += window.rate
    return rate


def breakpoints(sched):
    if isinstance(sched, ConstantLiabilityRate):
        return (0.0, float(sched.T))
    return tuple(sorted({float(w.start) for w in sched.windows} | {float(w.end) for w in sched.windows}))


def aggregate(sched, a, b):
    """Liabilities accrued over [a, b)."""
    if isinstance(sched, ConstantLiabilityRate):
        return sched.L_bar * ((b - a) / sched.T)
    total = np.zeros((sched.size, sched.size))
    for window in sched.windows:
        total += window.rate * window.overlap(a, b)
    return total


def society_share_floor(sched, T):
    """
    Smallest share of obligations owed to society over the active stretches of
    the schedule within [0, T], or None when nothing accrues.
    """
    points = sorted({0.0, float(T)} | {p for p in breakpoints(sched) if 0.0 < p < T})
    floors = []
    for a, b in zip(points[:-1], points[1:]):
        floor = society_rates_floor(eval_liability_rate(sched, 0.5 * (a + b)))
        if floor is not None:
            floors.append(floor)
    return min(floors) if floors else None


def creditor_windows(L_bar, spans):
    """
    Selector schedule: the obligations owed to node j (column j of L_bar) accrue
    evenly over spans[j] = (start, end).
    """
    L_bar = validate_liabilities(L_bar, 'liabilities.L')
    windows = []
    for node, (start, end) in sorted(spans.items()):
        if not 0 <= node < L_bar.shape[0]:
            raise ValidationError('liabilities.creditors: node {} out of range'.format(node))
        selector = np.zeros_like(L_bar)
        selector[node, node] = 1.0
        windows.append(Window(rate=L_bar @ selector / (end - start), start=float(start), end=float(end)))
    return PiecewiseWindows(windows=tuple(windows))


class RngStream:
    """Reproducible standard normal draws for one Monte-Carlo path."""

    BIT_GENERATOR = 'PCG64'

    def __init__(self, seed, path_index=0):
        self.seed = int(seed)
        self.path_index = int(path_index)
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.path_index,))
        self._generator = np.random.Generator(np.random.PCG64(sequence))
        self.draws = 0

    def draw_standard_normal(self, size):
        self.draws += 1
        return self._generator.standard_normal(size)

    def metadata(self):
        return {'bit_generator': self.BIT_GENERATOR, 'seed': self.seed, 'path_index': self.path_index}


def draw_standard_normal(stream, size):
    return stream.draw_standard_normal(size)


def net_position(L):
    """Incoming minus outgoing obligations per node, L^T 1 - L 1."""
    return L.sum(axis=0) - L.sum(axis=1)


def cashflow_from_json(block, size, default_target, schedule=None, path='$.cashflow'):
    if not isinstance(block, dict) or 'type' not in block:
        raise ValidationError('{} must be an object with a "type"'.format(path))

    def vector(key, default=None):
        values = block.get(key, default)
        if values is None:
            raise ValidationError('{}.{} is required'.format(path, key))
        vector = np.array(values, dtype=float)
        if vector.shape != (size,):
            raise ValidationError('{}.{} must have {} entries'.format(path, key, size))
        return vector

    kind = block['type']
    if kind == 'constant':
        return ConstantRate(mu=vector('mu', default_target))
    elif kind == 'bridge':
        return BrownianBridge(target=vector('target', default_target), vol=float(block.get('vol', 0.0)))
    elif kind == 'affine':
        sigma = np.array(block.get('sigma', np.zeros((size, size))), dtype=float)
        if sigma.shape != (size, size):
            raise ValidationError('{}.sigma must be {}x{}'.format(path, size, size))
        return AffineDiffusion(mu=vector('mu', default_target), sigma=sigma)
    elif kind == 'net-liabilities':
        if schedule is None:
            raise ValidationError('{} of type net-liabilities needs a liability schedule'.format(path))
        return LiabilityNetFlow(schedule=schedule)
    raise ValidationError(
        '{}.type must be one of constant, bridge, affine, net-liabilities, got "{}"'.format(path, kind)
    )


def schedule_from_json(block, L_default, T, path='$.liabilities'):
    if not isinstance(block, dict) or 'type' not in block:
        raise ValidationError('{} must be an object with a "type"'.format(path))
    kind = block['type']
    if kind == 'constant':
        L = block.get('L', L_default)
        return ConstantLiabilityRate(L_bar=validate_liabilities(L, '{}.L'.format(path)), T=float(T))
    elif kind == 'windows':
        if 'creditors' in block:
            L = validate_liabilities(block.get('L', L_default), '{}.L'.format(path))
            spans = {}
            for entry in block['creditors']:
                spans[int(entry['node'])] = (float(entry['start']), float(entry['end']))
            return creditor_windows(L, spans)
        windows = []
        for k, entry in enumerate(block.get('windows', ())):
            rate = validate_liabilities(entry['rate'], '{}.windows[{}].rate'.format(path, k))
            windows.append(Window(rate=rate, start=float(entry['start']), end=float(entry['end'])))
        return PiecewiseWindows(windows=tuple(windows))
    raise ValidationError('{}.type must be one of constant, windows, got "{}"'.format(path, kind))
