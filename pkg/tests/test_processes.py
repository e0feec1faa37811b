import numpy as np
import pytest

from clearnet import scenarios
from clearnet.network_core import HorizonError, ValidationError
from clearnet.processes import (
    AffineDiffusion, BrownianBridge, ConstantLiabilityRate, ConstantRate, LiabilityNetFlow, RngStream, aggregate,
    breakpoints, cashflow_from_json, creditor_windows, draw_standard_normal, eval_liability_rate, eval_mu_sigma,
    net_position, schedule_from_json, society_share_floor
)


def test_constant_rate():
    mu, sigma = eval_mu_sigma(ConstantRate(mu=[1.0, -2.0]), 0.3, np.zeros(2))
    np.testing.assert_allclose(mu, [1.0, -2.0])
    np.testing.assert_allclose(sigma, np.zeros((2, 2)))


def test_bridge_coefficients():
    target = np.array([2.0, -4.0])
    mu, sigma = eval_mu_sigma(BrownianBridge(target=target, vol=0.0), 0.5, target / 2)
    np.testing.assert_allclose(mu, target)
    np.testing.assert_allclose(sigma, np.zeros((2, 2)))
    _, sigma = eval_mu_sigma(BrownianBridge(target=target, vol=5.0), 0.5, target / 2)
    np.testing.assert_allclose(sigma, 5.0 * np.eye(2))


def test_bridge_horizon_guard():
    with pytest.raises(HorizonError):
        eval_mu_sigma(BrownianBridge(target=np.ones(2), vol=1.0), 1.0, np.zeros(2))


def test_bridge_rejects_negative_volatility():
    with pytest.raises(ValidationError, match='nonnegative'):
        BrownianBridge(target=np.ones(2), vol=-1.0)


def test_affine_diffusion():
    cashflow = AffineDiffusion(mu=[1.0, 0.0], sigma=[[1.0, 0.0], [0.5, 1.0]])
    mu, sigma = eval_mu_sigma(cashflow, 0.0, np.zeros(2))
    np.testing.assert_allclose(sigma, [[1.0, 0.0], [0.5, 1.0]])


def test_constant_liability_rate(reference_L):
    schedule = ConstantLiabilityRate(L_bar=reference_L, T=1.0)
    np.testing.assert_allclose(eval_liability_rate(schedule, 0.7), reference_L)
    np.testing.assert_allclose(aggregate(schedule, 0.0, 1.0), reference_L)
    assert breakpoints(schedule) == (0.0, 1.0)


def test_constant_liability_rate_over_longer_horizon(reference_L):
    schedule = ConstantLiabilityRate(L_bar=reference_L, T=4.0)
    np.testing.assert_allclose(eval_liability_rate(schedule, 1.0), reference_L / 4)
    np.testing.assert_allclose(aggregate(schedule, 1.0, 3.0), reference_L / 2)


def test_creditors_first_windows(reference_L):
    schedule = creditor_windows(reference_L, scenarios.CREDITORS_FIRST_SPANS)
    rate = eval_liability_rate(schedule, 0.1)
    expected = np.zeros_like(reference_L)
    expected[:, 1] = 5.0 * reference_L[:, 1]
    np.testing.assert_allclose(rate, expected)
    np.testing.assert_allclose(aggregate(schedule, 0.0, 1.0), reference_L, atol=1e-12)
    assert breakpoints(schedule) == pytest.approx((0.0, 0.2, 0.4, 0.6, 0.8, 1.0))


def test_society_window_is_last(reference_L):
    schedule = creditor_windows(reference_L, scenarios.CREDITORS_FIRST_SPANS)
    rate = eval_liability_rate(schedule, 0.9)
    np.testing.assert_allclose(rate[1:, 0], 5.0 * reference_L[1:, 0])
    np.testing.assert_allclose(rate[:, 1:], 0.0)


def test_windows_are_left_closed(reference_L):
    schedule = creditor_windows(reference_L, scenarios.SOCIETY_FIRST_SPANS)
    assert eval_liability_rate(schedule, 0.2)[:, 0].sum() == 0.0
    assert eval_liability_rate(schedule, 0.2)[:, 1].sum() > 0.0


def test_staggered_windows_aggregate_to_total(reference_L):
    schedule = creditor_windows(reference_L, scenarios.STAGGERED_SPANS)
    np.testing.assert_allclose(aggregate(schedule, 0.0, 1.0), reference_L, atol=1e-9)
    np.testing.assert_allclose(eval_liability_rate(schedule, 0.2)[:, 1], reference_L[:, 1] / 0.237)


def test_aggregate_is_additive(reference_L):
    schedule = creditor_windows(reference_L, scenarios.STAGGERED_SPANS)
    whole = aggregate(schedule, 0.0, 1.0)
    parts = aggregate(schedule, 0.0, 0.35) + aggregate(schedule, 0.35, 0.7) + aggregate(schedule, 0.7, 1.0)
    np.testing.assert_allclose(parts, whole, atol=1e-12)


def test_rate_constant_between_breakpoints(reference_L):
    schedule = creditor_windows(reference_L, scenarios.STAGGERED_SPANS)
    np.testing.assert_allclose(eval_liability_rate(schedule, 0.34), eval_liability_rate(schedule, 0.38))


def test_random_windows_aggregate_to_total(reference_L, rng):
    for _ in range(10):
        schedule = scenarios.random_windows(reference_L, rng)
        np.testing.assert_allclose(aggregate(schedule, 0.0, 1.0), reference_L, atol=1e-9)


def test_society_share_floor(reference_L):
    assert society_share_floor(ConstantLiabilityRate(L_bar=reference_L, T=1.0), 1.0) == pytest.approx(0.25)
    assert society_share_floor(creditor_windows(reference_L, scenarios.CREDITORS_FIRST_SPANS), 1.0) == 0.0
    assert society_share_floor(creditor_windows(reference_L, scenarios.STAGGERED_SPANS), 1.0) > 0.0


def test_net_flow_matches_accruing_obligations(reference_L):
    schedule = creditor_windows(reference_L, scenarios.CREDITORS_FIRST_SPANS)
    mu, sigma = eval_mu_sigma(LiabilityNetFlow(schedule=schedule), 0.1, np.zeros(5))
    np.testing.assert_allclose(mu, [0.0, 25.0, -15.0, -5.0, -5.0])
    np.testing.assert_allclose(mu, net_position(eval_liability_rate(schedule, 0.1)))
    assert not sigma.any()


def test_negative_window_rate_rejected(reference_L):
    with pytest.raises(ValidationError, match=r'\$\.liabilities\.windows\[0\]\.rate\[1\]\[0\] is negative'):
        schedule_from_json({
            'type': 'windows',
            'windows': [{'rate': (-reference_L).tolist(), 'start': 0.0, 'end': 1.0}],
        }, reference_L, 1.0)


def test_schedule_from_json_creditors(reference_L):
    creditors = [{'node': j, 'start': start, 'end': end} for j, (start, end) in scenarios.STAGGERED_SPANS.items()]
    schedule = schedule_from_json({'type': 'windows', 'creditors': creditors}, reference_L, 1.0)
    np.testing.assert_allclose(aggregate(schedule, 0.0, 1.0), reference_L, atol=1e-9)


def test_cashflow_from_json_errors():
    with pytest.raises(ValidationError, match=r'\$\.cashflow\.target must have 3 entries'):
        cashflow_from_json({'type': 'bridge', 'target': [1.0]}, 3, None)
    with pytest.raises(ValidationError, match='must be one of'):
        cashflow_from_json({'type': 'jump'}, 3, np.zeros(3))
    with pytest.raises(ValidationError, match='needs a liability schedule'):
        cashflow_from_json({'type': 'net-liabilities'}, 3, np.zeros(3))


def test_cashflow_from_json_defaults_bridge_target(reference_L):
    cashflow = cashflow_from_json({'type': 'bridge', 'vol': 2.0}, 5, net_position(reference_L))
    np.testing.assert_allclose(cashflow.target, [12.0, -7.0, -2.0, -1.0, -2.0])
    assert cashflow.vol == 2.0


def test_stream_is_reproducible():
    first = RngStream(seed=11, path_index=3)
    second = RngStream(seed=11, path_index=3)
    for _ in range(5):
        np.testing.assert_array_equal(draw_standard_normal(first, 5), draw_standard_normal(second, 5))
    assert first.draws == 5
    assert first.metadata() == {'bit_generator': 'PCG64', 'seed': 11, 'path_index': 3}


def test_stream_moments():
    draws = RngStream(seed=5).draw_standard_normal(100000)
    assert abs(draws.mean()) < 0.02
    assert abs(draws.var() - 1.0) < 0.05


def test_streams_of_different_paths_are_uncorrelated():
    first = RngStream(seed=5, path_index=0).draw_standard_normal(100000)
    second = RngStream(seed=5, path_index=1).draw_standard_normal(100000)
    assert not np.array_equal(first, second)
    assert abs(np.corrcoef(first, second)[0, 1]) < 0.02
