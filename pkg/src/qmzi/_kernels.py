"""Hot Wigner small-d kernels, numba and pure-numpy variants.

Elements use the Jacobi-polynomial form

    d^j_{m'm}(b) = (-1)^lam sqrt(C(2j-k, k+a) / C(k+b, b))
                   sin(b/2)^a cos(b/2)^b P_k^{(a,b)}(cos b)

with P evaluated by its forward three-term recurrence. All spin labels are
passed doubled (two_j, two_mp, two_m) so half-integers stay integral.
"""
import math

import numpy as np

from ._accel import njit


@njit
def _lbinom(n, k):
    return math.lgamma(n + 1.0) - math.lgamma(k + 1.0) - math.lgamma(n - k + 1.0)


@njit
def _params(two_j, two_mp, two_m):
    jpm = (two_j + two_m) // 2
    jmm = (two_j - two_m) // 2
    jpmp = (two_j + two_mp) // 2
    jmmp = (two_j - two_mp) // 2
    diff = (two_mp - two_m) // 2
    k = min(jpm, jmm, jpmp, jmmp)
    if k == jpm:
        a, lam = diff, diff
    elif k == jmm:
        a, lam = -diff, 0
    elif k == jpmp:
        a, lam = -diff, 0
    else:
        a, lam = diff, diff
    b = two_j - 2 * k - a
    return k, a, b, lam


@njit
def _jacobi(k, a, b, x):
    if k == 0:
        return 1.0
    p0 = 1.0
    p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) * 0.5
    for n in range(2, k + 1):
        s = 2.0 * n + a + b
        c1 = 2.0 * n * (n + a + b) * (s - 2.0)
        c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b)
        c3 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * s
        p0, p1 = p1, (c2 * p1 - c3 * p0) / c1
    return p1


@njit
def _d_element(two_j, two_mp, two_m, ch, sh, x):
    k, a, b, lam = _params(two_j, two_mp, two_m)
    coef = math.exp(0.5 * (_lbinom(two_j - k, k + a) - _lbinom(k + b, b)))
    if lam % 2 != 0:
        coef = -coef
    return coef * sh**a * ch**b * _jacobi(k, a, b, x)


@njit
def d_rows_numba(two_j, two_mp, phis):
    """Row m' of d^j over a vector of angles; result shape (len(phis), 2j+1)."""
    out = np.empty((phis.shape[0], two_j + 1))
    for g in range(phis.shape[0]):
        ch = math.cos(0.5 * phis[g])
        sh = math.sin(0.5 * phis[g])
        x = math.cos(phis[g])
        for i in range(two_j + 1):
            out[g, i] = _d_element(two_j, two_mp, 2 * i - two_j, ch, sh, x)
    return out


@njit
def d_matrix_numba(two_j, phi):
    """Full (2j+1)x(2j+1) d-matrix at one angle, indexed [j+m', j+m]."""
    out = np.empty((two_j + 1, two_j + 1))
    ch = math.cos(0.5 * phi)
    sh = math.sin(0.5 * phi)
    x = math.cos(phi)
    for r in range(two_j + 1):
        for c in range(two_j + 1):
            out[r, c] = _d_element(two_j, 2 * r - two_j, 2 * c - two_j, ch, sh, x)
    return out


def d_elements_numpy(two_j, two_mp, two_m, phi):
    """Broadcasting numpy evaluation of d^j_{m'm}(phi)."""
    two_mp, two_m, phi = np.broadcast_arrays(
        np.asarray(two_mp, dtype=np.int64), np.asarray(two_m, dtype=np.int64),
        np.asarray(phi, dtype=float))
    jpm = (two_j + two_m) // 2
    jmm = (two_j - two_m) // 2
    jpmp = (two_j + two_mp) // 2
    jmmp = (two_j - two_mp) // 2
    diff = (two_mp - two_m) // 2
    k = np.minimum(np.minimum(jpm, jmm), np.minimum(jpmp, jmmp))
    flip = (k != jpm) & ((k == jmm) | (k == jpmp))
    a = np.where(flip, -diff, diff)
    lam = np.where(flip, 0, diff)
    b = two_j - 2 * k - a

    from scipy.special import gammaln

    def lbinom(n, r):
        return gammaln(n + 1.0) - gammaln(r + 1.0) - gammaln(n - r + 1.0)

    coef = np.exp(0.5 * (lbinom(two_j - k, k + a) - lbinom(k + b, b)))
    coef = np.where(lam % 2 != 0, -coef, coef)
    x = np.cos(phi)
    af = a.astype(float)
    bf = b.astype(float)
    p0 = np.ones_like(x)
    p1 = (af + 1.0) + (af + bf + 2.0) * (x - 1.0) * 0.5
    res = np.where(k == 0, p0, p1)
    for n in range(2, int(k.max(initial=0)) + 1):
        s = 2.0 * n + af + bf
        c1 = 2.0 * n * (n + af + bf) * (s - 2.0)
        c2 = (s - 1.0) * (s * (s - 2.0) * x + af * af - bf * bf)
        c3 = 2.0 * (n + af - 1.0) * (n + bf - 1.0) * s
        p0, p1 = p1, (c2 * p1 - c3 * p0) / c1
        res = np.where(k == n, p1, res)
    return coef * np.sin(0.5 * phi) ** a * np.cos(0.5 * phi) ** b * res


def d_rows_numpy(two_j, two_mp, phis):
    two_m = np.arange(-two_j, two_j + 1, 2)
    return d_elements_numpy(two_j, two_mp, two_m[None, :], np.asarray(phis, float)[:, None])


def d_matrix_numpy(two_j, phi):
    idx = np.arange(-two_j, two_j + 1, 2)
    return d_elements_numpy(two_j, idx[:, None], idx[None, :], float(phi))
