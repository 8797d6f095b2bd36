import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmzi import _accel, _kernels
from qmzi.errors import DomainError
from qmzi.wigner import (SpinIndex, wigner_d, wigner_d_derivative, wigner_d_matrix,
                         wigner_d_matrix_oracle, wigner_d_row, wigner_d_sum)

angles = st.floats(-20.0, 20.0, allow_nan=False)


def test_spin_half():
    phi = 0.7
    d = wigner_d_matrix(1, phi)
    c, s = math.cos(phi / 2), math.sin(phi / 2)
    # rows/cols ordered m = -1/2, +1/2
    np.testing.assert_allclose(d, [[c, s], [-s, c]], atol=1e-15)
    assert wigner_d(SpinIndex.from_j(0.5, 0.5, -0.5), phi) == pytest.approx(-s)


def test_spin_one_closed_forms():
    phi = 1.1
    c = math.cos(phi)
    idx = SpinIndex.from_j
    assert wigner_d(idx(1, 1, 1), phi) == pytest.approx((1 + c) / 2)
    assert wigner_d(idx(1, 1, 0), phi) == pytest.approx(-math.sin(phi) / math.sqrt(2))
    assert wigner_d(idx(1, 0, 0), phi) == pytest.approx(c)
    assert wigner_d(idx(1, 1, -1), phi) == pytest.approx((1 - c) / 2)


@pytest.mark.parametrize("two_j", [0, 1, 2, 7, 20, 41, 60])
@pytest.mark.parametrize("phi", [0.0, 0.3, math.pi / 2, 2.0, math.pi, 5.0, -1.2])
def test_matches_eigh_oracle(two_j, phi):
    err = np.max(np.abs(wigner_d_matrix(two_j, phi) - wigner_d_matrix_oracle(two_j, phi)))
    assert err < 1e-12


@pytest.mark.parametrize("two_j", [2, 5, 10, 16])
def test_matches_factorial_sum_small_j(two_j):
    d = wigner_d_matrix(two_j, 1.3)
    for a in range(-two_j, two_j + 1, 2):
        for b in range(-two_j, two_j + 1, 2):
            ref = wigner_d_sum(SpinIndex(two_j, a, b), 1.3)
            assert d[(a + two_j) // 2, (b + two_j) // 2] == pytest.approx(ref, abs=1e-12)


def test_identity_and_period():
    for two_j in (3, 8):
        np.testing.assert_allclose(wigner_d_matrix(two_j, 0.0), np.eye(two_j + 1), atol=1e-15)
        np.testing.assert_allclose(wigner_d_matrix(two_j, 0.4 + 4 * math.pi),
                                   wigner_d_matrix(two_j, 0.4), atol=1e-13)
    # 2 pi rotation is (-1)^{2j}
    np.testing.assert_allclose(wigner_d_matrix(3, 2 * math.pi), -np.eye(4), atol=1e-14)


def test_row_vs_matrix_and_grid_shape():
    grid = np.linspace(0, math.pi, 9)
    rows = wigner_d_row(12, 4, grid)
    assert rows.shape == (9, 13)
    for g, phi in enumerate(grid):
        np.testing.assert_allclose(rows[g], wigner_d_matrix(12, phi)[8], atol=1e-14)


def test_derivative_matches_finite_difference():
    idx = SpinIndex(9, 3, -5)
    h = 1e-6
    fd = (wigner_d(idx, 0.8 + h) - wigner_d(idx, 0.8 - h)) / (2 * h)
    assert wigner_d_derivative(idx, 0.8) == pytest.approx(fd, abs=1e-8)


def test_invalid_indices():
    with pytest.raises(DomainError):
        SpinIndex(2, 1, 0)
    with pytest.raises(DomainError):
        SpinIndex(2, 4, 0)
    with pytest.raises(DomainError):
        wigner_d_matrix(-1, 0.1)
    with pytest.raises(DomainError):
        SpinIndex.from_j(0.3, 0.3, 0.3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 60), angles)
def test_orthonormal_rows(two_j, phi):
    d = wigner_d_matrix(two_j, phi)
    assert np.max(np.abs(d @ d.T - np.eye(two_j + 1))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 40), angles, angles)
def test_composition(two_j, a, b):
    lhs = wigner_d_matrix(two_j, a) @ wigner_d_matrix(two_j, b)
    assert np.max(np.abs(lhs - wigner_d_matrix(two_j, a + b))) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 30), angles)
def test_symmetries(two_j, phi):
    d = wigner_d_matrix(two_j, phi)
    m = np.arange(two_j + 1)
    sign = (-1.0) ** (m[:, None] - m[None, :])
    # d_{m'm} = (-1)^{m-m'} d_{mm'} = d_{-m,-m'}
    np.testing.assert_allclose(d, sign * d.T, atol=1e-12)
    np.testing.assert_allclose(d, d[::-1, ::-1].T, atol=1e-12)
    np.testing.assert_allclose(wigner_d_matrix(two_j, -phi), d.T, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 60), st.floats(0, 4 * math.pi))
def test_backends_agree(two_j, phi):
    a = _kernels.d_matrix_numpy(two_j, phi)
    b = _kernels.d_matrix_numba(two_j, phi)
    assert np.max(np.abs(a - b)) < 1e-13
    grid = np.linspace(0, math.pi, 17)
    two_mp = -two_j
    np.testing.assert_allclose(_kernels.d_rows_numpy(two_j, two_mp, grid),
                               _kernels.d_rows_numba(two_j, two_mp, grid), atol=1e-13)


def test_backend_flag_dispatch(monkeypatch):
    ref = wigner_d_matrix(10, 0.9)
    monkeypatch.setattr(_accel, "USE_NUMBA", not _accel.USE_NUMBA)
    np.testing.assert_allclose(wigner_d_matrix(10, 0.9), ref, atol=1e-14)
