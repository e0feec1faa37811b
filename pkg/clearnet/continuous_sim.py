"""
Continuous-time clearing of an interbank network.

Wealths and relative exposures follow the joint system

    dV = (I - A^T Lambda)^-1 (dc - dL^T 1 + A^T dL 1)
    da_i = (dL_i - a_i dL_i 1) / V_i^-      for distressed banks
    a_i  = dL_i / dL_i 1                    for solvent banks

integrated with an event-finding Euler scheme: every step is shortened so that
no bank crosses zero wealth inside it, and the distress matrix Lambda is
refined to a fixed point before the step is taken.
"""
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .network_core import (
    StepSizeUnderflow, ValidationError, distress_matrix, distressed_set, normalize_rows, society_row,
    solve_clearing_system
)
from .processes import RngStream, breakpoints, eval_liability_rate, eval_mu_sigma, society_share_floor
from .types import BindingConstraint, CrossingDirection


LOGGER = logging.getLogger()

STEP_FLOOR_RATIO = 1e-12
CROSSING_SNAP_TOLERANCE = 1e-9
HORIZON_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Event:

    t: float
    node: int
    direction: CrossingDirection


@dataclass(frozen=True)
class ContinuousState:

    t: float
    c: np.ndarray
    V: np.ndarray
    A: np.ndarray
    Lambda: np.ndarray
    last_rates: np.ndarray
    event_log: tuple = ()

    @property
    def distressed(self):
        return distressed_set(self.Lambda)


@dataclass(frozen=True)
class StepBounds:

    dt0: float
    dt: float
    binding: BindingConstraint = BindingConstraint.none
    node: int = None
    snapped: frozenset = frozenset()

    def __post_init__(self):
        if not 0 < self.dt <= self.dt0:
            raise StepSizeUnderflow('Step size {} outside (0, {}]'.format(self.dt, self.dt0))


@dataclass
class PathResult:

    trajectory: list
    events: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def terminal(self):
        return self.trajectory[-1]


def leontief_inverse(A, Lambda):
    """(I - A^T Lambda)^-1 by direct solve."""
    size = A.shape[0]
    identity = np.eye(size)
    return solve_clearing_system(identity - A.T @ Lambda, identity, distressed_set(Lambda))


def transformed_coefficients(state, mu, sigma, L_rate, Z):
    """Drift and diffusion of the wealths once the default cascade is resolved."""
    inverse = leontief_inverse(state.A, state.Lambda)
    mu_bar = inverse @ (mu - L_rate.sum(axis=0) + state.A.T @ L_rate.sum(axis=1))
    sigma_bar = inverse @ (sigma @ Z)
    return mu_bar, sigma_bar


def _crossing_cap(v, m, s):
    """
    Time until v + m dt + s sqrt(dt) reaches zero, or None when it does not.
    Solves m u^2 + s u + v = 0 for u = sqrt(dt).
    """
    discriminant = s * s - 4.0 * m * v
    if v > 0 and m < 0 and discriminant >= 0:
        u = (-s - math.sqrt(discriminant)) / (2.0 * m)
    elif v < 0 and m != 0 and discriminant >= 0:
        u = (-s + math.sqrt(discriminant)) / (2.0 * m)
    elif m == 0 and v * s < 0:
        return v * v / (s * s)
    else:
        return None
    return u * u if u > 0 else None


def event_limited_dt(V, mu_bar, sigma_bar, dt0, next_breakpoint_gap=math.inf, floor=None):
    """
    Largest step up to dt0 over which no bank wealth changes sign and no
    wealth increment reverses direction. Zero crossings demanding a step below
    `floor` are reported in `snapped` instead of limiting the step.
    """
    if dt0 <= 0:
        raise ValidationError('Base step must be positive, got {}'.format(dt0))
    floor = STEP_FLOOR_RATIO * dt0 if floor is None else floor
    dt = dt0
    binding = BindingConstraint.none
    node = None
    snapped = set()
    if next_breakpoint_gap < dt:
        dt = max(next_breakpoint_gap, floor)
        binding = BindingConstraint.schedule_breakpoint

    for i in range(1, len(V)):
        v, m, s = float(V[i]), float(mu_bar[i]), float(sigma_bar[i])
        cap = _crossing_cap(v, m, s)
        if cap is not None:
            if cap < floor:
                snapped.add(i)
            elif cap < dt:
                dt, binding, node = cap, BindingConstraint.zero_crossing, i
        if m * s < 0:
            cap = max(s * s / (m * m), floor)
            if cap < dt:
                dt, binding, node = cap, BindingConstraint.sign_preservation, i

    return StepBounds(dt0=dt0, dt=dt, binding=binding, node=node, snapped=frozenset(snapped))


def initial_exposures(L_rate):
    """Relative exposures at t = 0: normalized rate rows, 1/n for idle rows and society."""
    size = L_rate.shape[0]
    A = normalize_rows(L_rate)
    A[0] = society_row(size)
    return A


def _solvent_rows(A, V, L_rate, last_rates):
    """Snap rows of banks with V >= 0 to their normalized liability rate."""
    A = A.copy()
    last_rates = last_rates.copy()
    totals = L_rate.sum(axis=1)
    active = totals > 0
    active[0] = False
    last_rates[active] = L_rate[active] / totals[active, None]
    solvent = V >= 0
    solvent[0] = False
    A[solvent] = last_rates[solvent]
    return A, last_rates


def advance(state, dt, Z, mu, sigma, L_rate):
    """One Euler step of length dt with the distress matrix held at state.Lambda."""
    mu_bar, sigma_bar = transformed_coefficients(state, mu, sigma, L_rate, Z)
    root = math.sqrt(dt)
    c = state.c + mu * dt + (sigma @ Z) * root
    V = state.V + mu_bar * dt + sigma_bar * root

    A = state.A.copy()
    totals = L_rate.sum(axis=1)
    losses = np.maximum(-state.V, 0.0)
    for i in np.flatnonzero(state.V < 0):
        if i == 0 or totals[i] <= 0:
            continue
        weight = min(totals[i] * dt / losses[i], 1.0)
        A[i] = A[i] + weight * (L_rate[i] / totals[i] - A[i])
    A, last_rates = _solvent_rows(A, state.V, L_rate, state.last_rates)
    return replace(state, t=state.t + dt, c=c, V=V, A=A, last_rates=last_rates)


def interpolate(before, after, t):
    """Linear interpolation of c, V and A between two states."""
    weight = (t - before.t) / (after.t - before.t)
    return replace(
        after,
        t=t,
        c=before.c + weight * (after.c - before.c),
        V=before.V + weight * (after.V - before.V),
        A=before.A + weight * (after.A - before.A),
    )


def conservation_gap(state, V0):
    """Sum of V^+ minus initial wealth and accumulated cash flow; zero for the exact solution."""
    return float(np.maximum(state.V, 0.0).sum() - np.sum(V0) - state.c.sum())


def _next_breakpoint_gap(points, t, floor):
    ahead = [p - t for p in points if p - t > floor]
    return min(ahead) if ahead else math.inf


def _events(t, before, after):
    events = [Event(t=t, node=i, direction=CrossingDirection.distress) for i in sorted(after - before)]
    events += [Event(t=t, node=i, direction=CrossingDirection.recovery) for i in sorted(before - after)]
    return events


def _check_inputs(config):
    V0 = np.asarray(config.V0, dtype=float)
    if np.any(V0 < 0):
        raise ValidationError('V0[{}] must be nonnegative'.format(np.flatnonzero(V0 < 0)[0]))
    if np.any(V0[1:] == 0):
        LOGGER.warning('Banks {} start with zero wealth, a unique solution is not guaranteed'.format(
            (np.flatnonzero(V0[1:] == 0) + 1).tolist()
        ))
    delta = society_share_floor(config.schedule, config.T)
    if delta is None or delta <= 0:
        LOGGER.warning('Society share of obligations is not bounded away from zero, '
                       'uniqueness and boundedness of the solution are not guaranteed')
    return V0


def simulate_path(config, seed=None, path_index=0, record=True):
    """
    Integrate one path of the continuous clearing system over [0, config.T].

    With record=False only the initial and terminal states are kept.
    """
    V0 = _check_inputs(config)
    T = float(config.T)
    dt0 = float(config.dt0)
    size = V0.shape[0]
    floor = STEP_FLOOR_RATIO * dt0
    stream = RngStream(config.seed if seed is None else seed, path_index)
    points = [p for p in breakpoints(config.schedule) if 0.0 < p < T]
    max_steps = int(50 * T / dt0) + 10000

    L_rate = eval_liability_rate(config.schedule, 0.0)
    A = initial_exposures(L_rate)
    state = ContinuousState(
        t=0.0, c=np.zeros(size), V=V0.copy(), A=A, Lambda=np.zeros((size, size)), last_rates=A.copy()
    )
    trajectory = [state]
    events = []
    diagnostics = {'steps': 0, 'inner_cap_hits': 0, 'floor_snaps': 0, 'crossing_snaps': 0, 'max_inner_rounds': 0}

    while state.t < T - HORIZON_TOLERANCE:
        if diagnostics['steps'] >= max_steps:
            raise StepSizeUnderflow(
                'No progress after {} steps at t = {}'.format(max_steps, state.t), state.distressed
            )
        t = state.t
        L_rate = eval_liability_rate(config.schedule, t)
        A, last_rates = _solvent_rows(state.A, state.V, L_rate, state.last_rates)
        mu, sigma = eval_mu_sigma(config.cashflow, t, state.c)
        Z = stream.draw_standard_normal(size)
        gap = _next_breakpoint_gap(points, t, floor)

        V = state.V.copy()
        Lambda = distress_matrix(V, np.zeros(size))
        dt_cap = dt0
        bounds = None
        binding, node = BindingConstraint.none, None
        for rounds in range(1, size + 2):
            trial = replace(state, V=V, A=A, Lambda=Lambda, last_rates=last_rates)
            mu_bar, sigma_bar = transformed_coefficients(trial, mu, sigma, L_rate, Z)
            bounds = event_limited_dt(V, mu_bar, sigma_bar, dt_cap, gap, floor)
            if bounds.snapped:
                V[list(bounds.snapped)] = 0.0
                diagnostics['floor_snaps'] += len(bounds.snapped)
            if bounds.binding is not BindingConstraint.none:
                binding, node = bounds.binding, bounds.node
            dt_cap = bounds.dt
            following = distress_matrix(V, mu_bar * dt_cap + sigma_bar * math.sqrt(dt_cap))
            if np.array_equal(following, Lambda) and not bounds.snapped:
                break
            Lambda = following
        else:
            diagnostics['inner_cap_hits'] += 1
            LOGGER.warning('Distress refinement did not settle at t = {}, keeping {}'.format(
                t, sorted(distressed_set(Lambda))
            ))
        diagnostics['max_inner_rounds'] = max(diagnostics['max_inner_rounds'], rounds)

        current = distressed_set(Lambda)
        if current != state.distressed:
            new_events = _events(t, state.distressed, current)
            for event in new_events:
                LOGGER.debug('t = {:.6f}: node {} {}'.format(event.t, event.node, event.direction))
            events.extend(new_events)
            event_log = state.event_log + tuple(new_events)
        else:
            event_log = state.event_log

        trial = replace(state, V=V, A=A, Lambda=Lambda, last_rates=last_rates, event_log=event_log)
        following = advance(trial, dt_cap, Z, mu, sigma, L_rate)
        if binding is BindingConstraint.zero_crossing and \
                abs(following.V[node]) <= CROSSING_SNAP_TOLERANCE * (abs(V[node]) + 1.0):
            following.V[node] = 0.0
            diagnostics['crossing_snaps'] += 1
        elif binding is BindingConstraint.schedule_breakpoint and dt_cap == max(gap, floor):
            following = replace(following, t=t + gap)
        if following.t <= t:
            raise StepSizeUnderflow('Step did not advance past t = {}'.format(t), current)
        diagnostics['steps'] += 1

        if following.t > T:
            following = interpolate(trial, following, T)
        if not record and len(trajectory) > 1:
            trajectory[-1] = following
        else:
            trajectory.append(following)
        state = following

    if state.t != T:
        trajectory[-1] = replace(state, t=T)

    LOGGER.debug('Path {} finished in {} steps with {} events'.format(path_index, diagnostics['steps'], len(events)))
    return PathResult(trajectory=trajectory, events=events, diagnostics=diagnostics)
