"""
Discrete-time clearing with debt rolled forward between clearing dates.

Each step solves the clearing wealths for the new cash flows and liabilities
with a fictitious default loop over the rolled-forward relative liabilities,
then updates the relative exposures of every bank.
"""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .network_core import (
    ValidationError, regular_violations, society_row, validate_liabilities, validate_vector
)
from .processes import LiabilityNetFlow, aggregate, eval_mu_sigma, net_position
from .static_clearing import fictitious_default, picard_payments


LOGGER = logging.getLogger()


@dataclass(frozen=True)
class DiscreteState:

    t: float
    V: np.ndarray
    A: np.ndarray
    p_bar: np.ndarray
    pi: np.ndarray
    iterations: int = 0

    @property
    def losses(self):
        """Unpaid bank losses V^-, rolled forward as debt. Society never defaults."""
        losses = np.maximum(-self.V, 0.0)
        losses[0] = 0.0
        return losses


@dataclass(frozen=True)
class DiscreteSchedule:
    """Per-step cash flows c(t) and new liabilities L(t) for t = 0..T, starting from V(-1)."""

    V_init: np.ndarray
    c: tuple
    L: tuple

    def __post_init__(self):
        V_init = np.array(self.V_init, dtype=float)
        size = V_init.shape[0]
        if np.any(V_init < 0):
            raise ValidationError('V_init[{}] must be nonnegative'.format(np.flatnonzero(V_init < 0)[0]))
        if len(self.c) != len(self.L):
            raise ValidationError('c and L must have the same number of steps')
        c = tuple(validate_vector(c_t, size, 'c[{}]'.format(t)) for t, c_t in enumerate(self.c))
        L = tuple(validate_liabilities(L_t, 'L[{}]'.format(t)) for t, L_t in enumerate(self.L))
        for t, L_t in enumerate(L):
            if L_t.shape[0] != size:
                raise ValidationError('L[{}] must be {}x{}'.format(t, size, size))
        object.__setattr__(self, 'V_init', V_init)
        object.__setattr__(self, 'c', c)
        object.__setattr__(self, 'L', L)

    @property
    def steps(self):
        return len(self.c)

    @classmethod
    def from_static(cls, x, L):
        """Single clearing date reproducing the static problem (x, L)."""
        L = validate_liabilities(L)
        x = np.asarray(x, dtype=float)
        c = x + L.sum(axis=0) - L.sum(axis=1)
        return cls(V_init=np.zeros_like(x), c=(c,), L=(L,))


def initial_state(V_init):
    V_init = np.asarray(V_init, dtype=float)
    size = V_init.shape[0]
    A = np.array([_uniform_row(size, i) for i in range(size)])
    return DiscreteState(t=-1, V=V_init, A=A, p_bar=np.zeros(size), pi=A.copy())


def _uniform_row(size, i):
    row = np.full(size, 1.0 / (size - 1))
    row[i] = 0.0
    return row


def _owed(prev, L_t):
    return L_t + prev.pi * prev.losses[:, None]


def rolled_liabilities(prev, L_t):
    """
    Total obligations p_bar(t) and relative liabilities Pi(t, V_{t-1}) including the
    debt rolled forward from the previous clearing date.
    """
    size = L_t.shape[0]
    owed = _owed(prev, L_t)
    p_bar = owed.sum(axis=1)
    pi = np.empty_like(owed)
    for i in range(size):
        if i == 0:
            pi[i] = society_row(size)
        elif p_bar[i] > 0:
            pi[i] = owed[i] / p_bar[i]
        else:
            # Nothing new and nothing rolled: the row stays at 1/n
            pi[i] = _uniform_row(size, i)
    p_bar[0] = 0.0
    return p_bar, pi


def update_exposures(prev, L_t, V, p_bar):
    """
    Relative exposures after clearing, including the max{p_bar, V^-} denominator.

    Rows sum to one while V_i >= -p_bar_i. A bank losing more than it owes
    exposes its creditors to p_bar_i only, so its row sums to p_bar_i / V_i^-.
    """
    size = L_t.shape[0]
    owed = _owed(prev, L_t)
    losses = np.maximum(-V, 0.0)
    A = np.empty_like(L_t)
    A[0] = society_row(size)
    for i in range(1, size):
        denominator = max(p_bar[i], losses[i])
        if denominator > 0:
            A[i] = owed[i] / denominator
        else:
            A[i] = _uniform_row(size, i)
    return A


def check_step_hypotheses(c_t, L_t, t=None):
    """Log when a step violates the conditions that guarantee a unique clearing solution."""
    incoming = L_t[1:].sum(axis=0)
    outgoing = L_t.sum(axis=1)
    short = np.flatnonzero(c_t < incoming - outgoing - 1e-12)
    if short.size:
        LOGGER.warning(
            'Step {}: nodes {} have cash flow below their net interbank position, '
            'uniqueness not guaranteed'.format(t, short.tolist())
        )
    missing = regular_violations(L_t)
    if missing:
        LOGGER.warning('Step {}: banks {} owe nothing to society, uniqueness not guaranteed'.format(t, missing))
    return not short.size and not missing


def discrete_step(prev, c_t, L_t, t=None):
    """
    Clear one date: V(t) from V(t-1), the cash flow c(t) and new liabilities L(t).
    `t` labels the new state and defaults to the next integer date.
    """
    c_t = np.asarray(c_t, dtype=float)
    L_t = np.asarray(L_t, dtype=float)
    t = prev.t + 1 if t is None else t
    check_step_hypotheses(c_t, L_t, t)
    p_bar, pi = rolled_liabilities(prev, L_t)
    # Wealth if every bank paid in full, the rolled debt included
    base = prev.V + c_t + prev.pi.T @ prev.losses
    run = fictitious_default(base, pi, L_t.shape[0] - 1, p_bar)
    V = run.V
    A = update_exposures(prev, L_t, V, p_bar)
    LOGGER.debug('Clearing date {}: {} rounds, distressed {}'.format(
        t, run.iterations, sorted(run.orders[-1]) if run.orders else []
    ))
    return DiscreteState(t=t, V=V, A=A, p_bar=p_bar, pi=pi, iterations=run.iterations)


def discrete_step_dt(prev, delta_c, delta_L, dt=1.0):
    """Same clearing step driven by increments over [t, t + dt)."""
    return discrete_step(prev, delta_c, delta_L, t=prev.t + dt)


def run_discrete(sched):
    """Trajectory of clearing states for t = 0..T."""
    state = initial_state(sched.V_init)
    trajectory = []
    for c_t, L_t in zip(sched.c, sched.L):
        state = discrete_step(state, c_t, L_t)
        trajectory.append(state)
    return trajectory


def grid_increments(cashflow, schedule, T, dt, stream=None):
    """
    Yield (t, step, delta_c, delta_L) over the grid 0, dt, ..., T. Cash-flow
    increments are exact for deterministic rates and Euler samples otherwise.
    """
    if dt <= 0:
        raise ValidationError('dt must be positive')
    c = None
    for k in range(max(1, math.ceil(T / dt - 1e-9))):
        t = k * dt
        step = min((k + 1) * dt, T) - t
        delta_L = aggregate(schedule, t, t + step)
        c = np.zeros(delta_L.shape[0]) if c is None else c
        if isinstance(cashflow, LiabilityNetFlow):
            delta_c = net_position(delta_L)
        else:
            mu, sigma = eval_mu_sigma(cashflow, t, c)
            delta_c = mu * step
            if stream is not None and np.any(sigma):
                delta_c = delta_c + sigma @ stream.draw_standard_normal(c.shape[0]) * np.sqrt(step)
        c = c + delta_c
        yield t, step, delta_c, delta_L


def run_discrete_dt(cashflow, schedule, V0, T, dt, stream=None):
    """Discrete clearing on the grid 0, dt, ..., T driven by a cash-flow process and a liability schedule."""
    state = replace(initial_state(V0), t=0.0)
    trajectory = [state]
    for _, step, delta_c, delta_L in grid_increments(cashflow, schedule, T, dt, stream):
        state = discrete_step_dt(state, delta_c, delta_L, step)
        trajectory.append(state)
    return trajectory


def picard_step_oracle(prev, c_t, L_t):
    """Greatest and least per-step clearing wealths by monotone payment iteration."""
    L_t = np.asarray(L_t, dtype=float)
    c_t = np.asarray(c_t, dtype=float)
    p_bar, pi = rolled_liabilities(prev, L_t)
    # Carried equity plus the external inflow x(t) = c(t) - L(t)^T 1 + L(t) 1
    endowment = prev.V + prev.losses + c_t - L_t.sum(axis=0) + L_t.sum(axis=1)
    wealth = []
    for start in (p_bar, np.zeros_like(p_bar)):
        p = picard_payments(endowment, pi, p_bar, start)
        wealth.append(endowment + pi.T @ p - p_bar)
    return tuple(wealth)
