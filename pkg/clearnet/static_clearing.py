import logging
from dataclasses import dataclass, field

import numpy as np

from .network_core import (
    NonConvergenceError, regular_violations, relative_liabilities, solve_clearing_system,
    validate_liabilities, validate_vector
)


LOGGER = logging.getLogger()

PICARD_TOLERANCE = 1e-10
PICARD_MAX_ITERATIONS = 1000000


@dataclass(frozen=True)
class StaticProblem:

    x: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        L = validate_liabilities(self.L)
        x = validate_vector(self.x, L.shape[0], 'x', nonnegative=True)
        object.__setattr__(self, 'L', L)
        object.__setattr__(self, 'x', x)

    @property
    def n(self):
        return self.L.shape[0] - 1

    @property
    def p_bar(self):
        return self.L.sum(axis=1)

    @property
    def pi(self):
        return relative_liabilities(self.L)


@dataclass(frozen=True)
class StaticSolution:

    V: np.ndarray
    p: np.ndarray
    orders: tuple
    first_order_solvent: frozenset
    boundary_banks: frozenset = frozenset()
    iterations: int = 0

    @property
    def defaults(self):
        return self.orders[-1] if self.orders else frozenset()

    @property
    def default_order(self):
        """Per node: the fictitious-default round in which it first defaulted, 0 if never."""
        order = np.zeros(self.V.shape[0], dtype=int)
        for k, default_set in reversed(list(enumerate(self.orders, start=1))):
            for i in default_set:
                order[i] = k
        return order


@dataclass
class FictitiousDefaultRun:

    V: np.ndarray
    orders: list = field(default_factory=list)
    iterations: int = 0


def _insolvency_classes(V, cap):
    """Insolvent banks split into partial payers and banks whose loss covers everything they owe."""
    insolvent = V < 0
    insolvent[0] = False
    silent = insolvent & (V <= -cap)
    return (
        frozenset(int(i) for i in np.flatnonzero(insolvent & ~silent)),
        frozenset(int(i) for i in np.flatnonzero(silent)),
    )


def fictitious_default(base, pi, n, p_bar=None):
    """
    Grow the insolvent set and re-solve V = (I - pi^T Lambda)^-1 base until the
    set is stable. `base` is the wealth assuming every bank pays in full.

    With `p_bar` given, a bank whose loss reaches its total obligations pays
    nothing: its creditors lose pi_i p_bar_i and the rest of the loss stays with it.
    """
    size = n + 1
    identity = np.eye(size)
    cap = np.full(size, np.inf) if p_bar is None else np.asarray(p_bar, dtype=float)
    V = np.array(base, dtype=float)
    previous = (frozenset(), frozenset())
    run = FictitiousDefaultRun(V=V)
    for k in range(1, 2 * size + 2):
        current = _insolvency_classes(V, cap)
        if current == previous:
            break
        distressed, silent = current
        run.orders.append(distressed | silent)
        Lambda = np.zeros((size, size))
        Lambda[list(distressed), list(distressed)] = 1.0
        withheld = np.zeros(size)
        withheld[list(silent)] = cap[list(silent)]
        V = solve_clearing_system(identity - pi.T @ Lambda, base - pi.T @ withheld, distressed | silent)
        LOGGER.debug('Fictitious default round {}: insolvent {}, paying nothing {}'.format(
            k, sorted(distressed), sorted(silent)
        ))
        previous = current
        run.iterations = k
    else:
        raise NonConvergenceError(
            'Insolvent sets did not settle in {} rounds'.format(2 * size + 1), current[0] | current[1]
        )
    run.V = V
    return run


def _warn_irregular(L):
    missing = regular_violations(L)
    if missing:
        LOGGER.warning(
            'Banks {} owe nothing to society, uniqueness of the clearing solution is not guaranteed'.format(missing)
        )


def clear_static(prob):
    """Clearing wealths and payments of a static network via fictitious default."""
    _warn_irregular(prob.L)
    pi = prob.pi
    p_bar = prob.p_bar
    run = fictitious_default(prob.x + pi.T @ p_bar - p_bar, pi, prob.n)
    V = run.V
    p = np.clip(p_bar - np.maximum(-V, 0.0), 0.0, None)
    first_order, boundary = _first_order_solvent(prob)
    return StaticSolution(
        V=V,
        p=p,
        orders=tuple(run.orders),
        first_order_solvent=first_order,
        boundary_banks=boundary,
        iterations=run.iterations,
    )


def clearing_payments(prob):
    """Payment vector p = min(p_bar, (x + pi^T p)^+) of the static problem."""
    return clear_static(prob).p


def payment_map(p, endowment, pi, p_bar):
    return np.minimum(p_bar, np.maximum(endowment + pi.T @ p, 0.0))


def picard_payments(endowment, pi, p_bar, start, tolerance=PICARD_TOLERANCE, max_iterations=PICARD_MAX_ITERATIONS):
    p = np.array(start, dtype=float)
    for _ in range(max_iterations):
        following = payment_map(p, endowment, pi, p_bar)
        if np.max(np.abs(following - p)) < tolerance:
            return following
        p = following
    raise NonConvergenceError('Picard iteration did not converge in {} iterations'.format(max_iterations))


def picard_oracle(prob, tolerance=PICARD_TOLERANCE):
    """Greatest and least clearing wealths by monotone iteration from p_bar and from 0."""
    pi = prob.pi
    p_bar = prob.p_bar
    wealth = []
    for start in (p_bar, np.zeros_like(p_bar)):
        p = picard_payments(prob.x, pi, p_bar, start, tolerance)
        wealth.append(prob.x + pi.T @ p - p_bar)
    return tuple(wealth)


def _first_order_solvent(prob):
    margin = prob.x - prob.p_bar
    solvent = frozenset([0]) | frozenset(int(i) for i in np.flatnonzero(margin[1:] > 0) + 1)
    boundary = frozenset(int(i) for i in np.flatnonzero(margin[1:] == 0) + 1)
    return solvent, boundary


def classify_orders(prob):
    """Default rounds D^1 ⊆ D^2 ⊆ ... and the first-order solvent nodes."""
    pi = prob.pi
    p_bar = prob.p_bar
    run = fictitious_default(prob.x + pi.T @ p_bar - p_bar, pi, prob.n)
    solvent, boundary = _first_order_solvent(prob)
    if boundary:
        LOGGER.info('Banks {} have zero margin and are not counted as first-order solvent'.format(sorted(boundary)))
    return tuple(run.orders), solvent

