import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from qmzi.errors import DomainError
from qmzi.qalgebra import log_q_factorial, log_q_factorials, q_number

qs = st.floats(min_value=1e-3, max_value=1.0)


def mp_q_number(n, q):
    q = mpmath.mpf(q)
    return n if q == 1 else (1 - q**n) / (1 - q)


def test_small_values():
    assert q_number(0, 0.5) == 0.0
    assert q_number(1, 0.5) == 1.0
    assert q_number(2, 0.5) == pytest.approx(1.5, rel=1e-15)
    assert q_number(3, 0.5) == pytest.approx(1.75, rel=1e-15)
    assert q_number(7, 1.0) == 7.0


def test_near_one_no_cancellation():
    q = 1.0 - 1e-12
    with mpmath.workdps(50):
        ref = float(mp_q_number(30, mpmath.mpf(q)))
    assert q_number(30, q) == pytest.approx(ref, rel=1e-14)


def test_log_factorial_against_mpmath():
    with mpmath.workdps(50):
        ref = float(mpmath.fsum(mpmath.log(mp_q_number(k, 0.9)) for k in range(1, 31)))
    assert log_q_factorial(30, 0.9) == pytest.approx(ref, rel=1e-14)


def test_factorial_reduces_to_lgamma():
    for n in (0, 1, 5, 30, 170):
        assert log_q_factorial(n, 1.0) == pytest.approx(math.lgamma(n + 1), rel=1e-14, abs=1e-14)


def test_table_matches_scalar_and_is_readonly():
    table = log_q_factorials(30, 0.3)
    assert len(table) == 31
    for n in (0, 1, 10, 30):
        assert table[n] == pytest.approx(log_q_factorial(n, 0.3), rel=1e-15, abs=0)
    with pytest.raises(ValueError):
        table[0] = 1.0


@pytest.mark.parametrize("q", [0.0, -0.1, 1.0000001, float("nan")])
def test_bad_q(q):
    with pytest.raises(DomainError):
        q_number(3, q)


def test_bad_n():
    with pytest.raises(DomainError):
        q_number(-1, 0.5)
    with pytest.raises(DomainError):
        log_q_factorial(2.5, 0.5)


@given(st.integers(0, 200), qs)
def test_recurrence(n, q):
    # [n+1]_q = 1 + q [n]_q
    assert q_number(n + 1, q) == pytest.approx(1.0 + q * q_number(n, q), rel=1e-12)


@given(st.integers(1, 200), qs)
def test_bounds(n, q):
    # 1 <= [n]_q <= n, and below 1/(1-q)
    v = q_number(n, q)
    assert 1.0 - 1e-12 <= v <= n * (1 + 1e-12)
    if q < 1.0:
        assert v <= 1.0 / (1.0 - q) * (1 + 1e-12)


@given(st.integers(1, 100), qs)
def test_factorial_increments(n, q):
    assert log_q_factorial(n, q) - log_q_factorial(n - 1, q) == pytest.approx(
        math.log(q_number(n, q)), abs=1e-10)
