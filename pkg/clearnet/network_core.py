import logging
from dataclasses import dataclass

import numpy as np
from click import ClickException


LOGGER = logging.getLogger()


class ClearnetError(ClickException):
    pass


class ValidationError(ClearnetError):
    pass


class SolverError(ClearnetError):

    def __init__(self, message, active_set=None):
        self.reason = message
        self.active_set = tuple(sorted(active_set)) if active_set is not None else None
        if self.active_set is not None:
            message = '{} (active default set: {})'.format(message, list(self.active_set))
        super().__init__(message)

    def __reduce__(self):
        return type(self), (self.reason, self.active_set)


class NonConvergenceError(SolverError):
    pass


class StepSizeUnderflow(SolverError):
    pass


class HorizonError(ClearnetError):
    pass


class PathError(ClearnetError):

    def __init__(self, path_index, cause):
        self.path_index = path_index
        self.cause = cause
        super().__init__('Path {} failed: {}'.format(path_index, getattr(cause, 'message', cause)))

    def __reduce__(self):
        return type(self), (self.path_index, self.cause)


# Condition number above which a clearing system is treated as singular
SINGULAR_CONDITION = 1e12


def _as_matrix(values, path):
    try:
        matrix = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError('{} must be a numeric matrix'.format(path))
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValidationError('{} must be a square matrix, got shape {}'.format(path, matrix.shape))
    return matrix


def validate_liabilities(L, path='L'):
    """Check a liability matrix and return it as a float array."""
    L = _as_matrix(L, path)
    if not np.all(np.isfinite(L)):
        i, j = np.argwhere(~np.isfinite(L))[0]
        raise ValidationError('{}[{}][{}] is not finite'.format(path, i, j))
    if np.any(L < 0):
        i, j = np.argwhere(L < 0)[0]
        raise ValidationError('{}[{}][{}] is negative ({})'.format(path, i, j, L[i, j]))
    diagonal = np.flatnonzero(np.diag(L))
    if diagonal.size:
        i = diagonal[0]
        raise ValidationError('{}[{}][{}] must be zero (no self obligations)'.format(path, i, i))
    if np.any(L[0] != 0):
        j = np.flatnonzero(L[0])[0]
        raise ValidationError('{}[0][{}] must be zero (society owes nothing)'.format(path, j))
    return L


def validate_vector(values, size, path, nonnegative=False):
    try:
        vector = np.array(values, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError('{} must be a numeric vector'.format(path))
    if vector.shape != (size,):
        raise ValidationError('{} must have {} entries, got shape {}'.format(path, size, vector.shape))
    if not np.all(np.isfinite(vector)):
        raise ValidationError('{}[{}] is not finite'.format(path, np.flatnonzero(~np.isfinite(vector))[0]))
    if nonnegative and np.any(vector < 0):
        raise ValidationError('{}[{}] must be nonnegative'.format(path, np.flatnonzero(vector < 0)[0]))
    return vector


@dataclass(frozen=True)
class FinancialNetwork:
    """Banks 1..n plus the society node 0 with their liability matrix."""

    n: int
    L: np.ndarray
    names: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError('n must be at least 1, got {}'.format(self.n))
        L = validate_liabilities(self.L)
        if L.shape != (self.n + 1, self.n + 1):
            raise ValidationError('L must be {0}x{0} for n = {1}'.format(self.n + 1, self.n))
        L.setflags(write=False)
        object.__setattr__(self, 'L', L)
        if not self.names:
            object.__setattr__(self, 'names', default_names(self.n))
        elif len(self.names) != self.n + 1:
            raise ValidationError('names must have {} entries'.format(self.n + 1))
        else:
            object.__setattr__(self, 'names', tuple(self.names))

    @property
    def size(self):
        return self.n + 1

    @property
    def total_obligations(self):
        return self.L.sum(axis=1)

    @classmethod
    def from_json(cls, block, path='$.network'):
        if not isinstance(block, dict):
            raise ValidationError('{} must be an object'.format(path))
        if 'n' not in block or 'L' not in block:
            raise ValidationError('{} requires "n" and "L"'.format(path))
        n = block['n']
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValidationError('{}.n must be an integer'.format(path))
        L = validate_liabilities(block['L'], '{}.L'.format(path))
        if L.shape != (n + 1, n + 1):
            raise ValidationError('{}.L must be {}x{} for n = {}'.format(path, n + 1, n + 1, n))
        return cls(n=n, L=L, names=tuple(block.get('names') or ()))


def default_names(n):
    return ('society',) + tuple('bank {}'.format(i) for i in range(1, n + 1))


def relative_liabilities(L):
    """
    Row-normalize L. Rows without obligations (always the society row) owe
    1/n to every other node.
    """
    L = validate_liabilities(L)
    size = L.shape[0]
    n = size - 1
    totals = L.sum(axis=1)
    pi = np.zeros_like(L)
    owing = totals > 0
    pi[owing] = L[owing] / totals[owing, None]
    pi[~owing] = 1.0 / n if n else 0.0
    idle = np.flatnonzero(~owing)
    pi[idle, idle] = 0.0
    return pi


def normalize_rows(rates, fallback=None):
    """
    Row-normalize a nonnegative rate matrix without validation. Zero rows take
    the matching `fallback` row, or the 1/n convention when none is given.
    """
    size = rates.shape[0]
    totals = rates.sum(axis=1)
    result = np.empty_like(rates, dtype=float)
    owing = totals > 0
    result[owing] = rates[owing] / totals[owing, None]
    for i in np.flatnonzero(~owing):
        if fallback is not None:
            result[i] = fallback[i]
        else:
            result[i] = 1.0 / (size - 1)
            result[i, i] = 0.0
    return result


def society_row(size):
    row = np.full(size, 1.0 / (size - 1))
    row[0] = 0.0
    return row


def distress_matrix(V, dV):
    """Diagonal 0/1 matrix flagging banks with V < 0, or V = 0 and dV < 0."""
    V = np.asarray(V, dtype=float)
    dV = np.asarray(dV, dtype=float)
    if V.shape != dV.shape:
        raise ValidationError('V and dV must have the same length')
    flags = (V < 0) | ((V == 0) & (dV < 0))
    flags[0] = False
    return np.diag(flags.astype(float))


def distressed_set(Lambda):
    return frozenset(int(i) for i in np.flatnonzero(np.diag(Lambda)))


def regular_violations(L):
    """Banks which owe nothing to society (uniqueness may fail)."""
    L = np.asarray(L, dtype=float)
    return [i for i in range(1, L.shape[0]) if L[i, 0] <= 0]


def society_rates_floor(L):
    """
    Smallest share owed to society over banks with positive obligations, or
    None when no bank owes anything.
    """
    L = np.asarray(L, dtype=float)
    totals = L[1:].sum(axis=1)
    owing = totals > 0
    if not np.any(owing):
        return None
    return float(np.min(L[1:, 0][owing] / totals[owing]))


def solve_clearing_system(M, b, active_set=()):
    """Solve M x = b by direct factorization, rejecting (near) singular systems."""
    if np.linalg.cond(M) > SINGULAR_CONDITION:
        raise SolverError('Singular clearing system', active_set)
    try:
        return np.linalg.solve(M, b)
    except np.linalg.LinAlgError:
        raise SolverError('Singular clearing system', active_set)
