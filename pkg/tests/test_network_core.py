import pickle

import numpy as np
import pytest

from clearnet.network_core import (
    FinancialNetwork, PathError, SolverError, StepSizeUnderflow, ValidationError, distress_matrix, distressed_set,
    normalize_rows, regular_violations, relative_liabilities, society_rates_floor, society_row,
    solve_clearing_system, validate_liabilities
)


def test_validate_liabilities_rejects_negative_entry_with_index(reference_L):
    reference_L[2, 3] = -1.0
    with pytest.raises(ValidationError, match=r'L\[2\]\[3\] is negative'):
        validate_liabilities(reference_L)


def test_validate_liabilities_rejects_self_obligation(reference_L):
    reference_L[1, 1] = 1.0
    with pytest.raises(ValidationError, match=r'L\[1\]\[1\] must be zero'):
        validate_liabilities(reference_L)


def test_validate_liabilities_rejects_society_obligations(reference_L):
    reference_L[0, 2] = 1.0
    with pytest.raises(ValidationError, match='society owes nothing'):
        validate_liabilities(reference_L)


def test_validate_liabilities_rejects_non_square():
    with pytest.raises(ValidationError, match='square'):
        validate_liabilities([[0.0, 1.0]])


def test_network_from_json_reports_json_path(reference_L):
    reference_L[3, 1] = -2.0
    with pytest.raises(ValidationError, match=r'\$\.network\.L\[3\]\[1\]'):
        FinancialNetwork.from_json({'n': 4, 'L': reference_L.tolist()})


def test_network_from_json_checks_size(reference_L):
    with pytest.raises(ValidationError, match='must be 5x5'):
        FinancialNetwork.from_json({'n': 3, 'L': reference_L.tolist()})


def test_network_default_names(reference_L):
    network = FinancialNetwork(n=4, L=reference_L)
    assert network.names == ('society', 'bank 1', 'bank 2', 'bank 3', 'bank 4')
    assert network.size == 5
    np.testing.assert_allclose(network.total_obligations, [0.0, 12.0, 12.0, 6.0, 7.0])


def test_relative_liabilities_rows(reference_L):
    pi = relative_liabilities(reference_L)
    np.testing.assert_allclose(pi.sum(axis=1), np.ones(5))
    np.testing.assert_allclose(pi[0], [0.0, 0.25, 0.25, 0.25, 0.25])
    np.testing.assert_allclose(pi[3], [0.5, 1 / 6, 1 / 6, 0.0, 1 / 6])


def test_relative_liabilities_idle_bank_uses_uniform_row():
    L = np.array([
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
    ])
    pi = relative_liabilities(L)
    np.testing.assert_allclose(pi[1], [0.5, 0.0, 0.5])


def test_normalize_rows_fallback():
    rates = np.array([
        [0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0],
        [2.0, 6.0, 0.0],
    ])
    fallback = np.array([
        [0.0, 0.5, 0.5],
        [0.2, 0.0, 0.8],
        [0.5, 0.5, 0.0],
    ])
    result = normalize_rows(rates, fallback)
    np.testing.assert_allclose(result[1], [0.2, 0.0, 0.8])
    np.testing.assert_allclose(result[2], [0.25, 0.75, 0.0])
    np.testing.assert_allclose(normalize_rows(rates)[1], [0.5, 0.0, 0.5])


def test_society_row():
    np.testing.assert_allclose(society_row(4), [0.0, 1 / 3, 1 / 3, 1 / 3])


def test_distress_matrix_breaks_ties_with_direction():
    V = np.array([5.0, -1.0, 0.0, 0.0, 2.0])
    dV = np.array([-10.0, 1.0, -1.0, 1.0, -3.0])
    Lambda = distress_matrix(V, dV)
    np.testing.assert_array_equal(np.diag(Lambda), [0.0, 1.0, 1.0, 0.0, 0.0])
    assert distressed_set(Lambda) == frozenset({1, 2})


def test_distress_matrix_never_flags_society():
    Lambda = distress_matrix(np.array([-1.0, 1.0]), np.array([-1.0, 0.0]))
    assert distressed_set(Lambda) == frozenset()


def test_society_rates_floor(reference_L):
    assert society_rates_floor(reference_L) == pytest.approx(0.25)
    assert society_rates_floor(np.zeros((3, 3))) is None


def test_regular_violations(chain_L):
    assert regular_violations(chain_L) == []
    chain_L[2, 0] = 0.0
    assert regular_violations(chain_L) == [2]


def test_singular_system_reports_active_set():
    M = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(SolverError, match=r'active default set: \[1, 2\]'):
        solve_clearing_system(M, np.ones(2), {2, 1})


def test_errors_survive_pickling():
    error = pickle.loads(pickle.dumps(PathError(3, StepSizeUnderflow('no progress', {2, 1}))))
    assert isinstance(error, PathError)
    assert error.path_index == 3
    assert isinstance(error.cause, StepSizeUnderflow)
    assert error.cause.active_set == (1, 2)
    assert error.message == 'Path 3 failed: no progress (active default set: [1, 2])'
