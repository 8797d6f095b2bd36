import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmzi.errors import DegenerateStateError, DomainError, SolverError, TruncationError
from qmzi.states import (FockAmplitudes, StateKind, build_state, custom_state, fock_state,
                         photon_moments, q_cat, q_coherent, solve_amplitude)


def mp_amplitudes(alpha, q, n_max, parity=None):
    with mpmath.workdps(40):
        q = mpmath.mpf(q)
        terms = []
        fact = mpmath.mpf(1)
        for n in range(n_max + 1):
            if n > 0:
                fact *= n if q == 1 else (1 - q**n) / (1 - q)
            keep = parity is None or (n % 2 == 0) == (parity == "even")
            terms.append(mpmath.mpf(alpha) ** n / mpmath.sqrt(fact) if keep else mpmath.mpf(0))
        norm = mpmath.sqrt(mpmath.fsum(t * t for t in terms))
        return np.array([float(t / norm) for t in terms])


@pytest.mark.parametrize("q", [0.3, 0.9, 1.0])
@pytest.mark.parametrize("parity", [None, "even", "odd"])
def test_amplitudes_against_mpmath(q, parity):
    st_ = (q_coherent(1.3, q, 30, allow_truncation=True) if parity is None
           else q_cat(1.3, q, parity, 30, allow_truncation=True))
    ref = mp_amplitudes(1.3, q, 30, parity)
    np.testing.assert_allclose(st_.amplitudes.real, ref, rtol=1e-12, atol=1e-15)
    assert np.all(st_.amplitudes.imag == 0)


def test_glauber_reduction():
    # q = 1 gives Poissonian weights e^{-|a|^2} |a|^{2n}/n!
    alpha = 2.0
    st_ = q_coherent(alpha, 1.0, 30, allow_truncation=True)
    n = np.arange(31)
    pois = np.exp(-alpha**2 + 2 * n * math.log(alpha) - np.array([math.lgamma(k + 1) for k in n]))
    pois /= pois.sum()
    assert np.max(np.abs(st_.probabilities - pois)) < 1e-8
    assert abs(photon_moments(st_).mandel_q) < 1e-6


def test_complex_alpha_phase():
    st_ = q_coherent(0.5j, 0.8, 20)
    assert st_.amplitudes[1] / abs(st_.amplitudes[1]) == pytest.approx(1j)
    assert st_.amplitudes[2] / abs(st_.amplitudes[2]) == pytest.approx(-1)


def test_parity_masks():
    even = q_cat(1.0, 0.6, "even", 30)
    odd = q_cat(1.0, 0.6, "odd", 30)
    assert np.all(even.amplitudes[1::2] == 0)
    assert np.all(odd.amplitudes[0::2] == 0)
    assert even.kind is StateKind.Q_CAT_EVEN and odd.kind is StateKind.Q_CAT_ODD


def test_zero_alpha():
    vac = q_coherent(0.0, 0.5, 10)
    assert vac.amplitudes[0] == 1
    assert q_cat(0.0, 0.5, "even", 10).amplitudes[0] == 1
    with pytest.raises(DegenerateStateError):
        q_cat(0.0, 0.5, "odd", 10)


def test_truncation_guard():
    with pytest.raises(TruncationError):
        q_coherent(3.0, 1.0, 10)
    st_ = q_coherent(3.0, 1.0, 10, allow_truncation=True)
    assert st_.truncation_override
    assert 0.01 < st_.tail_bound < 1
    # divergent series: alpha^2 (1-q) >= 1
    assert q_coherent(2.0, 0.5, 30, allow_truncation=True).tail_bound == 1.0


def test_tail_bound_is_an_upper_bound():
    alpha, n_max = 2.0, 15
    st_ = q_coherent(alpha, 1.0, n_max, allow_truncation=True)
    n = np.arange(200)
    w = np.exp(2 * n * math.log(alpha) - np.array([math.lgamma(k + 1) for k in n]))
    true_tail = w[n_max + 1:].sum() / w.sum()
    assert true_tail <= st_.tail_bound <= 3 * true_tail


def test_other_builders():
    f = fock_state(3, 5)
    assert f.amplitudes[3] == 1 and f.n_max == 5
    with pytest.raises(DomainError):
        fock_state(6, 5)
    c = custom_state([3, 4j])
    assert np.allclose(c.probabilities, [0.36, 0.64])
    with pytest.raises(DegenerateStateError):
        custom_state([0, 0])
    assert build_state("odd", 0.5, 0.5, 20).kind is StateKind.Q_CAT_ODD
    with pytest.raises(DomainError):
        q_cat(1.0, 0.5, "neither", 10)
    with pytest.raises(DomainError):
        q_coherent(1.0, 1.5, 10)


def test_record_round_trip():
    st_ = q_cat(1.1 + 0.2j, 0.8, "even", 12, allow_truncation=True)
    back = FockAmplitudes.from_record(st_.to_record())
    assert np.array_equal(back.amplitudes, st_.amplitudes)
    assert back.kind is st_.kind and back.alpha == st_.alpha and back.q == st_.q


@pytest.mark.parametrize("kind", ["coherent", "even", "odd"])
@pytest.mark.parametrize("q", [0.5, 0.9, 1.0])
def test_solver_hits_target(kind, q):
    target = 3.0
    alpha = solve_amplitude(target, q, kind, 30)
    st_ = build_state(kind, alpha, q, 30, allow_truncation=True)
    assert photon_moments(st_).mean == pytest.approx(target, abs=1e-8)


def test_solver_edges():
    assert solve_amplitude(0.0, 0.5, "even", 30) == 0.0
    with pytest.raises(SolverError):
        solve_amplitude(1.0, 0.5, "odd", 30)  # odd cats have mean > 1
    with pytest.raises(SolverError):
        solve_amplitude(40.0, 0.9, "coherent", 30)  # cutoff saturates
    with pytest.raises(DomainError):
        solve_amplitude(-1.0, 0.9, "coherent", 30)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 3), st.floats(0.05, 1.0), st.sampled_from([None, "even", "odd"]))
def test_normalized(alpha, q, parity):
    if parity == "odd" and alpha == 0:
        return
    st_ = (q_coherent(alpha, q, 30, allow_truncation=True) if parity is None
           else q_cat(alpha, q, parity, 30, allow_truncation=True))
    assert math.fsum(st_.probabilities) == pytest.approx(1.0, abs=1e-13)
    assert 0.0 <= st_.tail_bound <= 1.0
