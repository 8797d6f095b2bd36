"""Wigner small-d matrix elements of exp(-i phi J_y) and their phi-derivatives.

Convention: d^j_{m'm}(phi) = <j m'| exp(-i phi J_y) |j m> with the standard
spin matrices, so d^{1/2}_{1/2,-1/2}(phi) = -sin(phi/2). Arrays are indexed
by i = j + m (0..2j).
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _accel, _kernels
from .errors import DomainError

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class SpinIndex:
    """(j, m', m) stored doubled: two_j = 2j, two_mp = 2m', two_m = 2m."""

    two_j: int
    two_mp: int
    two_m: int

    def __post_init__(self):
        _check_row(self.two_j, self.two_mp)
        _check_row(self.two_j, self.two_m)

    @classmethod
    def from_j(cls, j, mp, m):
        return cls(_twice(j), _twice(mp), _twice(m))


def _twice(x):
    t = 2 * x
    if abs(t - round(t)) > 1e-12:
        raise DomainError(f"{x!r} is not an integer or half-integer")
    return int(round(t))


def _check_row(two_j, two_mp):
    if int(two_j) != two_j or two_j < 0:
        raise DomainError(f"two_j must be a non-negative integer, got {two_j!r}")
    if int(two_mp) != two_mp or abs(two_mp) > two_j or (two_j - two_mp) % 2:
        raise DomainError(f"invalid magnetic index 2m={two_mp!r} for 2j={two_j}")


def _reduce(phi):
    return np.mod(np.asarray(phi, dtype=float), FOUR_PI)


def wigner_d_matrix(two_j, phi):
    """Full d^j(phi) as a (2j+1, 2j+1) array indexed [j+m', j+m]."""
    _check_row(two_j, two_j)
    phi = float(_reduce(phi))
    if _accel.USE_NUMBA:
        return _kernels.d_matrix_numba(int(two_j), phi)
    return _kernels.d_matrix_numpy(int(two_j), phi)


def wigner_d_row(two_j, two_mp, phi):
    """Row m' of d^j. Scalar phi gives shape (2j+1,); an array gives (len(phi), 2j+1)."""
    _check_row(two_j, two_mp)
    scalar = np.ndim(phi) == 0
    phis = np.atleast_1d(_reduce(phi)).astype(float)
    if _accel.USE_NUMBA:
        rows = _kernels.d_rows_numba(int(two_j), int(two_mp), phis)
    else:
        rows = _kernels.d_rows_numpy(int(two_j), int(two_mp), phis)
    return rows[0] if scalar else rows


def wigner_d(idx, phi):
    """Single element d^j_{m'm}(phi) for a SpinIndex."""
    row = wigner_d_row(idx.two_j, idx.two_mp, phi)
    return row[..., (idx.two_m + idx.two_j) // 2]


def ladder_coefficients(two_j):
    """(c_minus, c_plus) with J_-|m> = c_minus|m-1>, J_+|m> = c_plus|m+1>."""
    j = two_j / 2.0
    m = np.arange(two_j + 1) - j
    return np.sqrt((j + m) * (j - m + 1)), np.sqrt((j - m) * (j + m + 1))


def derivative_from_rows(rows, two_j):
    """phi-derivative of d-rows along the last (m) axis.

    d/dphi d_{m'm} = (c_-(m) d_{m',m-1} - c_+(m) d_{m',m+1}) / 2, from
    differentiating exp(-i phi J_y) on the right: -i J_y = (J_- - J_+)/2.
    """
    cm, cp = ladder_coefficients(two_j)
    rows = np.asarray(rows)
    out = np.zeros_like(rows)
    out[..., 1:] += cm[1:] * rows[..., :-1]
    out[..., :-1] -= cp[:-1] * rows[..., 1:]
    return 0.5 * out


def wigner_d_derivative(idx, phi):
    row = wigner_d_row(idx.two_j, idx.two_mp, phi)
    return derivative_from_rows(row, idx.two_j)[..., (idx.two_m + idx.two_j) // 2]


def wigner_d_sum(idx, phi):
    """Reference evaluation by the explicit factorial sum.

    Each term is a signed exp of log-factorials; the terms are summed
    exactly with math.fsum. Term rounding still cancels badly for j > ~15
    near phi = pi/2, so this is a cross-check for small j, not the engine.
    """
    two_j, two_mp, two_m = idx.two_j, idx.two_mp, idx.two_m
    jpm, jmm = (two_j + two_m) // 2, (two_j - two_m) // 2
    jpmp, jmmp = (two_j + two_mp) // 2, (two_j - two_mp) // 2
    diff = (two_mp - two_m) // 2
    phi = float(_reduce(phi))
    c, s = math.cos(0.5 * phi), math.sin(0.5 * phi)
    lf = math.lgamma
    log_pref = 0.5 * (lf(jpmp + 1) + lf(jmmp + 1) + lf(jpm + 1) + lf(jmm + 1))
    terms = []
    for k in range(max(0, -diff), min(jpm, jmmp) + 1):
        pc = jpm + jmmp - 2 * k
        ps = diff + 2 * k
        if (pc > 0 and c == 0.0) or (ps > 0 and s == 0.0):
            continue
        sign = -1.0 if (diff + k) % 2 else 1.0
        if pc % 2 and c < 0:
            sign = -sign
        if ps % 2 and s < 0:
            sign = -sign
        logt = log_pref - (lf(jpm - k + 1) + lf(k + 1) + lf(diff + k + 1) + lf(jmmp - k + 1))
        if pc:
            logt += pc * math.log(abs(c))
        if ps:
            logt += ps * math.log(abs(s))
        terms.append(sign * math.exp(logt))
    return math.fsum(terms)


def jy_spin_matrix(two_j):
    """Hermitian J_y in the |j m> basis (m ascending)."""
    cm, cp = ladder_coefficients(two_j)
    n = two_j + 1
    jy = np.zeros((n, n), dtype=complex)
    i = np.arange(n - 1)
    jy[i + 1, i] = cp[:-1] / 2j
    jy[i, i + 1] = -cp[:-1] / 2j
    return jy


def wigner_d_matrix_oracle(two_j, phi):
    """Independent d^j(phi) from the eigendecomposition of the J_y generator."""
    w, v = np.linalg.eigh(jy_spin_matrix(two_j))
    u = (v * np.exp(-1j * float(phi) * w)) @ v.conj().T
    return u.real
