"""Truncated Fock-basis q-coherent and q-cat probe states."""
import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateStateError, DomainError, SolverError, TruncationError
from .qalgebra import check_q, log_q_factorials, q_number

EPS_TAIL = 1e-10


class StateKind(str, enum.Enum):
    Q_COHERENT = "q_coherent"
    Q_CAT_EVEN = "q_cat_even"
    Q_CAT_ODD = "q_cat_odd"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"coherent": cls.Q_COHERENT, "even": cls.Q_CAT_EVEN, "odd": cls.Q_CAT_ODD}
        value = str(value).lower()
        return aliases.get(value) or cls(value)


@dataclass(frozen=True, eq=False)
class FockAmplitudes:
    """Normalized amplitudes a_0..a_{n_max} of a single-mode pure state.

    ``tail_bound`` is an upper estimate of the probability mass the
    untruncated state carries beyond ``n_max``; it is attributable, not
    corrected for (amplitudes are renormalized over the kept range).
    """

    amplitudes: np.ndarray
    kind: StateKind = StateKind.CUSTOM
    alpha: complex = 0j
    q: float = 1.0
    tail_bound: float = 0.0
    truncation_override: bool = False

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_max(self):
        return len(self.amplitudes) - 1

    @property
    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def to_record(self):
        return {
            "kind": self.kind.value,
            "q": self.q,
            "alpha": [self.alpha.real, self.alpha.imag],
            "n_max": self.n_max,
            "tail_bound": self.tail_bound,
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }

    @classmethod
    def from_record(cls, rec):
        alpha = rec.get("alpha", 0.0)
        if isinstance(alpha, (list, tuple)):
            alpha = complex(alpha[0], alpha[1])
        amps = np.array([complex(re, im) for re, im in rec["amplitudes"]])
        if len(amps) != rec["n_max"] + 1:
            raise DomainError("amplitude count does not match n_max")
        return cls(
            amps,
            kind=StateKind.parse(rec["kind"]),
            alpha=complex(alpha),
            q=float(rec["q"]),
            tail_bound=float(rec.get("tail_bound", 0.0)),
        )


@dataclass(frozen=True)
class PhotonMoments:
    mean: float
    variance: float

    @property
    def mandel_q(self):
        """Mandel parameter (var - mean)/mean; 0 for Poissonian statistics."""
        return (self.variance - self.mean) / self.mean if self.mean > 0 else 0.0


def _check_n_max(n_max):
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a non-negative integer, got {n_max!r}")
    return int(n_max)


def _series_tail_bound(abs_alpha2, q, n_max, log_kept_sum):
    """Bound on sum_{n>n_max} |alpha|^{2n}/[n]_q! relative to the kept mass.

    Term ratios |alpha|^2/[n+1]_q decrease in n, so once a ratio r < 1 is
    reached the rest is bounded by the geometric series t_n r/(1-r).
    """
    if abs_alpha2 == 0.0:
        return 0.0
    if q < 1.0 and abs_alpha2 * (1.0 - q) >= 1.0:
        return 1.0  # series diverges
    log_a2 = math.log(abs_alpha2)
    log_t = n_max * log_a2 - float(log_q_factorials(n_max, q)[-1])
    explicit = []
    n = n_max
    for _ in range(1_000_000):
        n += 1
        log_t += log_a2 - math.log(q_number(n, q))
        explicit.append(log_t)
        r = abs_alpha2 / q_number(n + 1, q)
        if r < 1.0 and (r <= 0.5 or log_t < log_kept_sum - 80.0):
            explicit.append(log_t + math.log(r) - math.log1p(-r))
            break
    else:  # pragma: no cover
        return 1.0
    log_rem = logsumexp(explicit)
    return float(math.exp(log_rem - np.logaddexp(log_rem, log_kept_sum)))


def _build(alpha, q, n_max, parity, kind, eps_tail, allow_truncation):
    q = check_q(q)
    n_max = _check_n_max(n_max)
    alpha = complex(alpha)
    n = np.arange(n_max + 1)
    r = abs(alpha)
    keep = np.ones(n_max + 1, dtype=bool)
    if parity == "even":
        keep = n % 2 == 0
    elif parity == "odd":
        keep = n % 2 == 1
    if r == 0.0:
        if parity == "odd":
            raise DegenerateStateError("odd cat state with alpha = 0 is undefined")
        logmag = np.where(n == 0, 0.0, -np.inf)
    else:
        logmag = n * math.log(r) - 0.5 * log_q_factorials(n_max, q)
    logmag = np.where(keep, logmag, -np.inf)
    if not np.isfinite(logmag).any():
        raise DegenerateStateError(f"no admissible Fock component below n_max={n_max}")
    mag = np.exp(logmag - logmag.max())
    amps = mag * np.exp(1j * cmath.phase(alpha) * n)
    amps /= math.sqrt(math.fsum(mag**2))
    # cat/coherent normalizations cancel after renormalizing over the kept range
    tail = _series_tail_bound(r * r, q, n_max, float(logsumexp(2 * logmag[keep])))
    if tail > eps_tail and not allow_truncation:
        raise TruncationError(
            f"truncation at n_max={n_max} drops ~{tail:.3g} probability (> {eps_tail:g}) "
            f"for alpha={alpha}, q={q}; raise n_max or pass allow_truncation=True"
        )
    return FockAmplitudes(amps, kind=kind, alpha=alpha, q=q, tail_bound=tail,
                          truncation_override=allow_truncation)


def q_coherent(alpha, q, n_max, *, eps_tail=EPS_TAIL, allow_truncation=False):
    """q-deformed nonlinear coherent state, a_n proportional to alpha^n / sqrt([n]_q!)."""
    return _build(alpha, q, n_max, None, StateKind.Q_COHERENT, eps_tail, allow_truncation)


def q_cat(alpha, q, parity, n_max, *, eps_tail=EPS_TAIL, allow_truncation=False):
    """Even or odd superposition of |alpha>_q and |-alpha>_q."""
    parity = str(parity).lower()
    if parity not in ("even", "odd"):
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")
    kind = StateKind.Q_CAT_EVEN if parity == "even" else StateKind.Q_CAT_ODD
    return _build(alpha, q, n_max, parity, kind, eps_tail, allow_truncation)


def fock_state(n, n_max):
    a = np.zeros(_check_n_max(n_max) + 1, dtype=complex)
    if not 0 <= n <= n_max:
        raise DomainError(f"Fock index {n} outside 0..{n_max}")
    a[n] = 1.0
    return FockAmplitudes(a)


def custom_state(amplitudes, *, normalize=True):
    a = np.asarray(amplitudes, dtype=complex)
    norm = np.linalg.norm(a)
    if norm == 0:
        raise DegenerateStateError("zero amplitude vector")
    if normalize:
        a = a / norm
    return FockAmplitudes(a)


def build_state(kind, alpha, q, n_max, **kw):
    kind = StateKind.parse(kind)
    if kind is StateKind.Q_COHERENT:
        return q_coherent(alpha, q, n_max, **kw)
    if kind is StateKind.Q_CAT_EVEN:
        return q_cat(alpha, q, "even", n_max, **kw)
    if kind is StateKind.Q_CAT_ODD:
        return q_cat(alpha, q, "odd", n_max, **kw)
    raise DomainError("custom states have no generator amplitude")


def photon_moments(state):
    p = state.probabilities
    n = np.arange(len(p))
    mean = float(np.dot(n, p))
    var = float(np.dot((n - mean) ** 2, p))
    return PhotonMoments(mean, max(var, 0.0))


def _mean_at(alpha, q, kind, n_max):
    if alpha == 0.0:
        return 1.0 if kind is StateKind.Q_CAT_ODD else 0.0
    st = build_state(kind, alpha, q, n_max, allow_truncation=True)
    return photon_moments(st).mean


def solve_amplitude(target_mean, q, kind, n_max, *, tol=1e-9):
    """Real alpha >= 0 whose truncated state has mean photon number ``target_mean``.

    Bisection on [0, alpha_hi] with alpha_hi doubled until the target is
    bracketed. Raises SolverError when the cutoff saturates first or the
    target lies below the family's minimum mean (1 for odd cats).
    """
    kind = StateKind.parse(kind)
    q = check_q(q)
    n_max = _check_n_max(n_max)
    target = float(target_mean)
    if target < 0 or math.isnan(target):
        raise DomainError(f"target mean must be >= 0, got {target_mean!r}")
    if kind is StateKind.CUSTOM:
        raise DomainError("cannot solve amplitude for a custom state")
    floor = _mean_at(0.0, q, kind, n_max)
    if target == floor and kind is not StateKind.Q_CAT_ODD:
        return 0.0
    if target <= floor:
        raise SolverError(f"target mean {target} unreachable for {kind.value} (minimum {floor})")

    trace = [(0.0, floor)]
    lo, hi = 0.0, 1.0
    m_hi = _mean_at(hi, q, kind, n_max)
    trace.append((hi, m_hi))
    while m_hi < target:
        lo = hi
        hi *= 2.0
        m_prev, m_hi = m_hi, _mean_at(hi, q, kind, n_max)
        trace.append((hi, m_hi))
        if m_hi - m_prev < 1e-13 or hi > 1e8:
            raise SolverError(
                f"target mean {target} not bracketable at n_max={n_max} "
                f"(cutoff saturates near {m_hi:.6g}) for {kind.value}, q={q}"
            )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        m = _mean_at(mid, q, kind, n_max)
        trace.append((mid, m))
        if abs(m - target) <= 1e-13 * max(1.0, target):
            lo = hi = mid
            break
        if m < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.spacing(hi):
            break
    alpha = lo if abs(_mean_at(lo, q, kind, n_max) - target) <= abs(
        _mean_at(hi, q, kind, n_max) - target) else hi

    trace.sort()
    means = np.array([m for _, m in trace])
    if np.any(np.diff(means) < -1e-12):
        raise SolverError(f"mean photon number not monotone in alpha for {kind.value}, q={q}")
    resid = abs(_mean_at(alpha, q, kind, n_max) - target)
    if resid > tol:
        raise SolverError(f"bisection stalled with residual {resid:.3g} for target {target}")
    return alpha
