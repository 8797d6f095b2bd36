"""Photon-count likelihoods of a Mach-Zehnder interferometer, U = exp(-i phi J_y).

Mode a carries the coherent-type state (coefficients C_n), mode b the
cat-type state (K_n). A two-mode Fock state |n_a, n_b> sits in the spin
block j = N/2 at m = (n_a - n_b)/2, so inside block N both input and output
components are indexed by the mode-a photon number. Detector 1 counts mode a.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DeficiencyError, DomainError, OutOfSupportError
from .states import FockAmplitudes, StateKind
from .wigner import derivative_from_rows, wigner_d_matrix, wigner_d_row

# Which index of d^{N/2} the outcome occupies in the count amplitude
# sum_n C_{N-n} K_n d_{., .}. "row": d_{mu, N/2-n} (outcome is m');
# "column": d_{N/2-n, mu}. Pinned by agreement with oracle_distribution;
# tests assert the other choice disagrees.
INDEX_ORDER = "row"

ORACLE_MAX_N = 16
SAMPLING_MAX_DEFICIENCY = 1e-6


@dataclass(frozen=True, eq=False)
class TwoModeInput:
    """Product input |coherent>_a |cat>_b with the phase-matching factor on the cat.

    ``c`` and ``k`` are the coefficient vectors actually fed to the
    interferometer; with ``phase_matched`` the cat amplitudes carry i^n.
    """

    mode_a: FockAmplitudes
    mode_b: FockAmplitudes
    phase_matched: bool = True
    swapped: bool = False
    c: np.ndarray = field(init=False, repr=False)
    k: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.mode_a.n_max != self.mode_b.n_max:
            raise DomainError(
                f"modes must share n_max, got {self.mode_a.n_max} and {self.mode_b.n_max}")
        n = np.arange(self.mode_b.n_max + 1)
        kvec = np.array(self.mode_b.amplitudes)
        if self.phase_matched:
            kvec = kvec * (1j ** (n % 4))
        cvec = np.array(self.mode_a.amplitudes)
        if self.swapped:
            cvec, kvec = kvec, cvec
        cvec.setflags(write=False)
        kvec.setflags(write=False)
        object.__setattr__(self, "c", cvec)
        object.__setattr__(self, "k", kvec)

    @property
    def n_max(self):
        return self.mode_a.n_max

    @property
    def max_total(self):
        return 2 * self.n_max

    @cached_property
    def blocks(self):
        """v_N[i] = C_i K_{N-i} for N = 0..2 n_max (i = photons in mode a)."""
        out = []
        for total in range(self.max_total + 1):
            v = np.zeros(total + 1, dtype=complex)
            lo, hi = max(0, total - self.n_max), min(total, self.n_max)
            i = np.arange(lo, hi + 1)
            v[lo:hi + 1] = self.c[i] * self.k[total - i]
            v.setflags(write=False)
            out.append(v)
        return tuple(out)

    @cached_property
    def block_masses(self):
        return np.array([np.vdot(v, v).real for v in self.blocks])

    def metadata(self):
        return {
            "q_a": self.mode_a.q,
            "q_b": self.mode_b.q,
            "kind_a": self.mode_a.kind.value,
            "kind_b": self.mode_b.kind.value,
            "alpha_a": abs(self.mode_a.alpha),
            "alpha_b": abs(self.mode_b.alpha),
            "n_max": self.n_max,
            "phase_matched": self.phase_matched,
            "swapped": self.swapped,
        }


def make_input(coherent, cat, *, phase_matched=True, swap=False):
    return TwoModeInput(coherent, cat, phase_matched=phase_matched, swapped=swap)


def is_phase_matched_probe(inp):
    cats = (StateKind.Q_CAT_EVEN, StateKind.Q_CAT_ODD)
    return (inp.mode_a.kind is StateKind.Q_COHERENT and inp.mode_b.kind in cats
            and inp.phase_matched)


def _check_outcome(n1, n2, inp):
    if int(n1) != n1 or int(n2) != n2 or n1 < 0 or n2 < 0:
        raise DomainError(f"counts must be non-negative integers, got ({n1}, {n2})")
    total = int(n1) + int(n2)
    if total > inp.max_total:
        raise OutOfSupportError(
            f"outcome N={total} exceeds 2*n_max={inp.max_total}; no input support")
    return int(n1), total


def _outcome_row(n1, total, phi, order):
    """Coefficients multiplying v_N for outcome (n1, N - n1); phi scalar or grid."""
    row = wigner_d_row(total, 2 * n1 - total, phi)
    if order == "row":
        return row
    # d_{m, mu} = (-1)^(m - mu) d_{mu, m}
    sign = np.where((np.arange(total + 1) - n1) % 2, -1.0, 1.0)
    return row * sign


def _block_matrix(total, phi, order):
    d = wigner_d_matrix(total, phi)
    return d if order == "row" else d.T


def outcome_amplitude(n1, n2, phi, inp, *, order=INDEX_ORDER):
    """<n1, n2| exp(-i phi J_y) |psi_in>."""
    n1, total = _check_outcome(n1, n2, inp)
    return complex(_outcome_row(n1, total, float(phi), order) @ inp.blocks[total])


def likelihood(n1, n2, phi, inp, *, order=INDEX_ORDER):
    return abs(outcome_amplitude(n1, n2, phi, inp, order=order)) ** 2


def likelihood_grid(n1, n2, phis, inp, *, order=INDEX_ORDER):
    """p(n1, n2 | phi) for every phi in ``phis``."""
    n1, total = _check_outcome(n1, n2, inp)
    rows = _outcome_row(n1, total, np.asarray(phis, dtype=float), order)
    return np.abs(rows @ inp.blocks[total]) ** 2


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """p(n1, n2 | phi) over all outcomes with N = n1 + n2 <= n_cap, ordered by (N, n1)."""

    phi: float
    n1: np.ndarray
    n2: np.ndarray
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def total_mass(self):
        return math.fsum(self.p)

    @property
    def deficiency(self):
        return 1.0 - self.total_mass

    @property
    def entries(self):
        return [((int(a), int(b)), float(x)) for a, b, x in zip(self.n1, self.n2, self.p)]

    def block_mass(self, total):
        return math.fsum(self.p[(self.n1 + self.n2) == total])

    def as_dict(self):
        return {(int(a), int(b)): float(x) for a, b, x in zip(self.n1, self.n2, self.p)}

    def to_csv(self):
        buf = io.StringIO()
        buf.write(f"# phi={self.phi!r}\n")
        for key in sorted(self.meta):
            buf.write(f"# {key}={self.meta[key]!r}\n")
        buf.write(f"# deficiency={self.deficiency!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n1", "n2", "p"])
        for a, b, x in zip(self.n1, self.n2, self.p):
            w.writerow([int(a), int(b), repr(float(x))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        meta, rows = {}, []
        lines = text.splitlines()
        body = [ln for ln in lines if not ln.startswith("#")]
        for ln in lines:
            if ln.startswith("# ") and "=" in ln:
                key, val = ln[2:].split("=", 1)
                meta[key] = val
        reader = csv.DictReader(body)
        for r in reader:
            rows.append((int(r["n1"]), int(r["n2"]), float(r["p"])))
        phi = float(meta.pop("phi"))
        meta.pop("deficiency", None)
        arr = np.array(rows, dtype=float).reshape(-1, 3)
        return cls(phi, arr[:, 0].astype(int), arr[:, 1].astype(int), arr[:, 2], meta)


def _resolve_cap(n_cap, inp):
    n_cap = inp.max_total if n_cap is None else int(n_cap)
    if n_cap < 0 or n_cap > inp.max_total:
        raise DomainError(f"N_cap must lie in 0..{inp.max_total}, got {n_cap}")
    return n_cap


def _assemble(phi, blocks_p, inp):
    n1 = np.concatenate([np.arange(len(p)) for p in blocks_p])
    tot = np.concatenate([np.full(len(p), t) for t, p in enumerate(blocks_p)])
    return OutcomeDistribution(float(phi), n1, tot - n1, np.concatenate(blocks_p), inp.metadata())


def full_distribution(phi, inp, n_cap=None, *, order=INDEX_ORDER):
    """Every outcome probability with N <= n_cap via per-block d-matrices."""
    n_cap = _resolve_cap(n_cap, inp)
    blocks_p = [np.abs(_block_matrix(t, phi, order) @ inp.blocks[t]) ** 2
                for t in range(n_cap + 1)]
    return _assemble(phi, blocks_p, inp)


def two_mode_jy_block(total):
    """J_y = (i/2)(b^dag a - a^dag b) on the basis |i, N-i>, i = photons in mode a."""
    m = np.zeros((total + 1, total + 1), dtype=complex)
    for i in range(total + 1):
        if i < total:  # a^dag b: |i, N-i> -> |i+1, N-i-1>
            m[i + 1, i] += -0.5j * math.sqrt((i + 1) * (total - i))
        if i > 0:  # b^dag a: |i, N-i> -> |i-1, N-i+1>
            m[i - 1, i] += 0.5j * math.sqrt(i * (total - i + 1))
    return m


def oracle_distribution(phi, inp, n_cap):
    """Dense check of full_distribution: exponentiate each two-mode J_y block."""
    n_cap = _resolve_cap(n_cap, inp)
    if n_cap > ORACLE_MAX_N:
        raise DomainError(f"oracle is limited to N_cap <= {ORACLE_MAX_N}")
    blocks_p = []
    for t in range(n_cap + 1):
        w, v = np.linalg.eigh(two_mode_jy_block(t))
        u = (v * np.exp(-1j * float(phi) * w)) @ v.conj().T
        blocks_p.append(np.abs(u @ inp.blocks[t]) ** 2)
    return _assemble(phi, blocks_p, inp)


def amplitudes_with_derivative(phi, inp, n_cap=None):
    """Per block N, the output amplitudes A_N(phi) and dA_N/dphi (index n1)."""
    n_cap = _resolve_cap(n_cap, inp)
    out = []
    for t in range(n_cap + 1):
        d = _block_matrix(t, phi, INDEX_ORDER)
        dd = derivative_from_rows(d, t)
        v = inp.blocks[t]
        out.append((d @ v, dd @ v))
    return out


def sample_counts(rng, dist, size=None):
    """Draw outcomes by inverse CDF over the (N, n1) ordering of ``dist``.

    Returns an (n1, n2) tuple, or two integer arrays when ``size`` is given.
    """
    if dist.deficiency >= SAMPLING_MAX_DEFICIENCY:
        raise DeficiencyError(
            f"distribution misses {dist.deficiency:.3g} probability; raise n_max or N_cap")
    cdf = np.cumsum(dist.p)
    cdf /= cdf[-1]
    u = rng.random(size)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
    if size is None:
        return int(dist.n1[idx]), int(dist.n2[idx])
    return dist.n1[idx].astype(int), dist.n2[idx].astype(int)
