"""Quantum and classical Fisher information for the interferometer, and precision bounds."""
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConsistencyError, DeficiencyError, DomainError
from .mzi import amplitudes_with_derivative, full_distribution, is_phase_matched_probe

CFI_MAX_DEFICIENCY = 1e-8
CFI_P_FLOOR = 1e-15
JY_MEAN_TOL = 1e-10


def qfi_closed_form(inp):
    """F_Q as the explicit double sum over the product coefficients.

    Reading of the cross term: both products share the single sum over
    (n, m) with the common weight sqrt((n+1)(n+2)(m+1)(m+2)); it is
    -4 Re(<a^2><b^dag 2>), which is what agrees with 4 Var(J_y).
    """
    c, k = inp.c, inp.k
    n = np.arange(len(c), dtype=float)
    pc, pk = np.abs(c) ** 2, np.abs(k) ** 2
    diag = np.outer(pc, pk) * (n[:, None] + n[None, :] + 2.0 * np.outer(n, n))
    nn = n[:-2]
    w = np.sqrt(np.outer((nn + 1) * (nn + 2), (nn + 1) * (nn + 2)))
    # rows index n (mode a), columns m (mode b)
    kk = k[:-2] * np.conj(k[2:])
    cc = np.conj(c[:-2]) * c[2:]
    cross = (np.outer(cc, kk) + np.conj(np.outer(cc, kk))) * w
    return math.fsum(np.concatenate([diag.ravel(), -cross.real.ravel()]))


def _apply_jy(psi):
    """J_y = (i/2)(b^dag a - a^dag b) on psi[n_a, n_b]; result one row/column larger."""
    na, nb = psi.shape
    src = np.zeros((na + 1, nb + 1), dtype=complex)
    src[:na, :nb] = psi
    ia = np.sqrt(np.arange(na + 1))[:, None]
    ib = np.sqrt(np.arange(nb + 1))[None, :]
    # (a^dag b psi)[x, y] = sqrt(x) sqrt(y+1) psi[x-1, y+1]
    up = np.zeros_like(src)
    up[1:, :-1] = ia[1:] * ib[:, 1:] * src[:-1, 1:]
    # (b^dag a psi)[x, y] = sqrt(x+1) sqrt(y) psi[x+1, y-1]
    down = np.zeros_like(src)
    down[:-1, 1:] = ia[1:] * ib[:, 1:] * src[1:, :-1]
    return 0.5j * (down - up), src


def jy_moments(inp):
    """(<J_y>, <J_y^2>) of the product input, by ladder action on the truncated state."""
    psi = np.outer(inp.c, inp.k)
    jpsi, src = _apply_jy(psi)
    mean = np.vdot(src, jpsi)
    return float(mean.real), float(np.vdot(jpsi, jpsi).real)


def qfi_variance(inp):
    """F_Q = 4 Var(J_y) for the pure input."""
    mean, second = jy_moments(inp)
    if is_phase_matched_probe(inp) and abs(mean) >= JY_MEAN_TOL:
        raise ConsistencyError(f"<J_y> = {mean:.3g} should vanish for this input class")
    return 4.0 * (second - mean * mean)


def cfi(inp, phi, n_cap=None):
    """Classical Fisher information of photon counting, with analytic dp/dphi.

    Outcomes with p < 1e-15 sit at (or within rounding of) a zero of the
    amplitude A; there (dp/dphi)^2/p is replaced by its limit 4|dA/dphi|^2
    instead of 0/0 noise. Dropping them outright undercounts F_C badly at
    symmetric points such as odd cats at phi = pi/2.
    """
    blocks = amplitudes_with_derivative(phi, inp, n_cap)
    amp = np.concatenate([a for a, _ in blocks])
    damp = np.concatenate([d for _, d in blocks])
    p = np.abs(amp) ** 2
    deficiency = 1.0 - math.fsum(p)
    if deficiency >= CFI_MAX_DEFICIENCY:
        raise DeficiencyError(f"outcome distribution misses {deficiency:.3g} probability")
    dp = 2.0 * (np.conj(amp) * damp).real
    keep = p >= CFI_P_FLOOR
    zero_limit = 4.0 * np.abs(damp[~keep]) ** 2
    return math.fsum(np.concatenate([dp[keep] ** 2 / p[keep], zero_limit]))


def cfi_finite_difference(inp, phi, h=1e-5, n_cap=None):
    """CFI with dp/dphi from Richardson-extrapolated central differences.

    Near-zero outcomes use the limit 2 p'' of (p')^2/p at a double zero,
    with p'' from a second difference at a wider step.
    """
    p0 = full_distribution(phi, inp, n_cap).p

    def shifted(step):
        return full_distribution(phi + step, inp, n_cap).p, full_distribution(phi - step, inp, n_cap).p

    hi1, lo1 = shifted(h)
    hi2, lo2 = shifted(h / 2)
    dp = (4.0 * (hi2 - lo2) / h - (hi1 - lo1) / (2.0 * h)) / 3.0
    keep = p0 >= CFI_P_FLOOR
    wide = 1e-3
    hiw, low = shifted(wide)
    hiw2, low2 = shifted(wide / 2)
    mid = p0[~keep]
    c1 = (hiw[~keep] - 2.0 * mid + low[~keep]) / wide**2
    c2 = (hiw2[~keep] - 2.0 * mid + low2[~keep]) / (wide / 2) ** 2
    curv = (4.0 * c2 - c1) / 3.0
    return math.fsum(np.concatenate([dp[keep] ** 2 / p0[keep], 2.0 * curv]))


def qcrb_delta_phi(fisher, nu):
    if not fisher > 0:
        raise DomainError(f"Fisher information must be positive, got {fisher!r}")
    if int(nu) != nu or nu < 1:
        raise DomainError(f"nu must be a positive integer, got {nu!r}")
    return 1.0 / math.sqrt(nu * fisher)


def heisenberg_reference(mean_total):
    if mean_total < 0:
        raise DomainError("mean photon number must be >= 0")
    return float(mean_total) ** 2


def corrected_mse_bound(f_c, nu, gamma1, gamma2):
    """Second-order lower bound on the mean-square error; may undercut 1/(nu F_C)."""
    if not f_c > 0:
        raise DomainError(f"F_C must be positive, got {f_c!r}")
    if nu < 1:
        raise DomainError(f"nu must be >= 1, got {nu!r}")
    first = 1.0 / (nu * f_c)
    second = (-1.0 / f_c + gamma1 / f_c**3 + gamma2 / f_c**4) / nu**2
    return first + second


@dataclass(frozen=True)
class FisherReport:
    fq_closed: float
    fq_variance: float
    fc: float
    phi_eval: float
    q: float
    mean_a: float
    mean_b: float
    parity: str = ""
    nu: int | None = None

    def as_dict(self):
        return asdict(self)

    @property
    def qcrb(self):
        return qcrb_delta_phi(self.fq_variance, self.nu) if self.nu else None


def fisher_report(inp, phi, *, q, mean_a, mean_b, parity="", nu=None):
    return FisherReport(
        fq_closed=qfi_closed_form(inp),
        fq_variance=qfi_variance(inp),
        fc=cfi(inp, phi),
        phi_eval=float(phi),
        q=float(q),
        mean_a=float(mean_a),
        mean_b=float(mean_b),
        parity=parity,
        nu=nu,
    )
