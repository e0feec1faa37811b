"""
Built-in reference data: a four bank network with a society node and the
liability schedules that spread its aggregate obligations over [0, 1].
"""
import numpy as np

from .config_utils import ScenarioConfig, default_dt, default_paths, default_seed
from .network_core import FinancialNetwork
from .processes import (
    BrownianBridge, ConstantLiabilityRate, LiabilityNetFlow, PiecewiseWindows, Window, creditor_windows,
    net_position
)
from .static_clearing import StaticProblem


REFERENCE_L = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0, 0.0, 7.0, 1.0, 1.0],
    [3.0, 3.0, 0.0, 3.0, 3.0],
    [3.0, 1.0, 1.0, 0.0, 1.0],
    [3.0, 1.0, 2.0, 1.0, 0.0],
])
REFERENCE_V0 = np.array([100.0, 1.0, 3.0, 2.0, 5.0])

# Clearing wealths of the aggregate problem, rounded to two decimals
REFERENCE_STATIC_WEALTH = np.array([109.38, -6.81, -3.03, -0.32, 1.62])

CREDITORS_FIRST_SPANS = {1: (0.0, 0.2), 2: (0.2, 0.4), 3: (0.4, 0.6), 4: (0.6, 0.8), 0: (0.8, 1.0)}
SOCIETY_FIRST_SPANS = {0: (0.0, 0.2), 1: (0.2, 0.4), 2: (0.4, 0.6), 3: (0.6, 0.8), 4: (0.8, 1.0)}
STAGGERED_SPANS = {0: (0.0, 1.0), 1: (0.145, 0.382), 2: (0.331, 0.509), 3: (0.301, 0.740), 4: (0.673, 0.778)}


def reference_network():
    return FinancialNetwork(n=4, L=REFERENCE_L.copy())


def reference_problem():
    return StaticProblem(x=REFERENCE_V0.copy(), L=REFERENCE_L.copy())


def constant_rates(vol=0.0, dt0=default_dt, seed=default_seed, n_paths=1):
    """Obligations accrue evenly; cash flows follow a bridge to the aggregate net position."""
    return ScenarioConfig(
        network=reference_network(),
        V0=REFERENCE_V0.copy(),
        cashflow=BrownianBridge(target=net_position(REFERENCE_L), vol=vol),
        schedule=ConstantLiabilityRate(L_bar=REFERENCE_L.copy(), T=1.0),
        dt0=dt0,
        seed=seed,
        n_paths=n_paths,
        name='constant-rates',
    )


def _net_flow_scenario(spans, name, dt0):
    schedule = creditor_windows(REFERENCE_L, spans)
    return ScenarioConfig(
        network=reference_network(),
        V0=REFERENCE_V0.copy(),
        cashflow=LiabilityNetFlow(schedule=schedule),
        schedule=schedule,
        dt0=dt0,
        name=name,
    )


def creditors_first(dt0=default_dt):
    """Obligations owed to each bank come due in turn, those owed to society last."""
    return _net_flow_scenario(CREDITORS_FIRST_SPANS, 'creditors-first', dt0)


def society_first(dt0=default_dt):
    return _net_flow_scenario(SOCIETY_FIRST_SPANS, 'society-first', dt0)


def staggered_bridge(vol=2.0, dt0=default_dt, seed=default_seed, n_paths=default_paths):
    """Overlapping creditor windows with bridge cash flows to the aggregate net position."""
    return ScenarioConfig(
        network=reference_network(),
        V0=REFERENCE_V0.copy(),
        cashflow=BrownianBridge(target=net_position(REFERENCE_L), vol=vol),
        schedule=creditor_windows(REFERENCE_L, STAGGERED_SPANS),
        dt0=dt0,
        seed=seed,
        n_paths=n_paths,
        name='staggered-bridge',
    )


def random_windows(L_bar, rng, max_windows=3):
    """
    Random schedule aggregating to L_bar over [0, 1]. Obligations owed to
    society accrue evenly throughout; those owed to each bank are split over up
    to `max_windows` random windows with random shares.
    """
    size = L_bar.shape[0]
    windows = [Window(rate=_column(L_bar, 0), start=0.0, end=1.0)]
    for j in range(1, size):
        if not L_bar[:, j].any():
            continue
        count = int(rng.integers(1, max_windows + 1))
        shares = rng.dirichlet(np.ones(count))
        for share in shares:
            start, end = np.sort(rng.uniform(0.0, 1.0, size=2))
            if end - start < 1e-3:
                end = min(start + 1e-3, 1.0)
                start = end - 1e-3
            rate = _column(L_bar, j) * (share / (end - start))
            windows.append(Window(rate=rate, start=float(start), end=float(end)))
    return PiecewiseWindows(windows=tuple(windows))


def _column(L_bar, j):
    rate = np.zeros_like(L_bar)
    rate[:, j] = L_bar[:, j]
    return rate


def random_window_scenario(rng, dt0=default_dt, name='random-windows'):
    schedule = random_windows(REFERENCE_L, rng)
    return ScenarioConfig(
        network=reference_network(),
        V0=REFERENCE_V0.copy(),
        cashflow=LiabilityNetFlow(schedule=schedule),
        schedule=schedule,
        dt0=dt0,
        name=name,
    )
