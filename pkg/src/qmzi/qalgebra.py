"""Deformed integer arithmetic: q-numbers and log-domain q-factorials."""
import math
from functools import lru_cache

import numpy as np

from .errors import DomainError


def check_q(q):
    """Validate a deformation parameter, returning it as a float in (0, 1]."""
    q = float(q)
    if not (0.0 < q <= 1.0) or math.isnan(q):
        raise DomainError(f"deformation parameter must satisfy 0 < q <= 1, got {q!r}")
    return q


def _check_n(n):
    if int(n) != n or n < 0:
        raise DomainError(f"n must be a non-negative integer, got {n!r}")
    return int(n)


def q_number(n, q):
    """[n]_q = (1 - q**n) / (1 - q), with [n]_1 = n.

    Evaluated as -expm1(n*log1p(-d))/d with d = 1 - q, which stays accurate
    to a few ulp as q -> 1 instead of dividing two vanishing differences.
    """
    n = _check_n(n)
    q = check_q(q)
    if q == 1.0 or n <= 1:
        return float(n)
    d = 1.0 - q
    return -math.expm1(n * math.log1p(-d)) / d


def log_q_factorial(n, q):
    """ln([n]_q!) = sum_{k=1..n} ln [k]_q, accumulated exactly with fsum."""
    n = _check_n(n)
    q = check_q(q)
    return math.fsum(math.log(q_number(k, q)) for k in range(2, n + 1))


@lru_cache(maxsize=256)
def _log_q_factorial_table(n_max, q):
    logs = [0.0] + [math.log(q_number(k, q)) for k in range(1, n_max + 1)]
    table = np.array([math.fsum(logs[: k + 1]) for k in range(n_max + 1)])
    table.setflags(write=False)
    return table


def log_q_factorials(n_max, q):
    """Read-only array of ln([n]_q!) for n = 0..n_max."""
    return _log_q_factorial_table(_check_n(n_max), check_q(q))
