"""Grid Bayesian phase inference on [0, pi] from photon-count records."""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.signal import find_peaks

from .errors import DegenerateUpdateError, DomainError
from .mzi import likelihood_grid

DEFAULT_GRID = 2048
MIN_GRID = 64
PROMINENCE = 1e-3


@dataclass(frozen=True, eq=False)
class PhasePosterior:
    """Posterior over a uniform phase grid spanning [0, pi].

    ``log_density`` is canonical and normalized so the trapezoidal integral
    of exp(log_density) is one; -inf marks exact zeros.
    """

    grid: np.ndarray
    log_density: np.ndarray
    shots_absorbed: int = 0

    @property
    def density(self):
        return np.exp(self.log_density)

    @property
    def size(self):
        return len(self.grid)

    def integral(self):
        return float(trapezoid(self.density, self.grid))

    def to_csv(self, meta=None):
        buf = io.StringIO()
        buf.write(f"# shots_absorbed={self.shots_absorbed}\n")
        for key, val in sorted((meta or {}).items()):
            buf.write(f"# {key}={val!r}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["phi", "density"])
        for x, d in zip(self.grid, self.density):
            w.writerow([repr(float(x)), repr(float(d))])
        return buf.getvalue()


def _normalized(log_density, grid):
    top = np.max(log_density)
    if not np.isfinite(top):
        raise DegenerateUpdateError("likelihood vanishes on the whole phase grid")
    shifted = log_density - top
    z = trapezoid(np.exp(shifted), grid)
    return shifted - math.log(z)


def uniform_prior(grid_size=DEFAULT_GRID):
    if int(grid_size) != grid_size or grid_size < MIN_GRID:
        raise DomainError(f"grid size must be an integer >= {MIN_GRID}, got {grid_size!r}")
    grid = np.linspace(0.0, math.pi, int(grid_size))
    return PhasePosterior(grid, np.full(int(grid_size), -math.log(math.pi)), 0)


class LikelihoodCache:
    """Memoizes p(n1, n2 | phi_g) over one grid for one input state."""

    def __init__(self, inp, grid):
        self.inp = inp
        self.grid = np.asarray(grid, dtype=float)
        self._logs = {}

    def log_likelihood(self, outcome):
        key = (int(outcome[0]), int(outcome[1]))
        hit = self._logs.get(key)
        if hit is None:
            p = likelihood_grid(key[0], key[1], self.grid, self.inp)
            with np.errstate(divide="ignore"):
                hit = np.log(p)
            hit.setflags(write=False)
            self._logs[key] = hit
        return hit

    def __len__(self):
        return len(self._logs)


def _cache_for(post, inp, cache):
    if cache is None:
        return LikelihoodCache(inp, post.grid)
    if cache.inp is not inp or cache.grid.shape != post.grid.shape:
        raise DomainError("likelihood cache built for a different input or grid")
    return cache


def bayes_update(post, outcome, inp, cache=None):
    """Multiply in p(n1, n2 | phi) and renormalize."""
    cache = _cache_for(post, inp, cache)
    logd = _normalized(post.log_density + cache.log_likelihood(outcome), post.grid)
    return PhasePosterior(post.grid, logd, post.shots_absorbed + 1)


def joint_update(post, outcomes, inp, cache=None):
    """One update with the product likelihood of all outcomes."""
    cache = _cache_for(post, inp, cache)
    total = np.zeros_like(post.log_density)
    for o in outcomes:
        total = total + cache.log_likelihood(o)
    logd = _normalized(post.log_density + total, post.grid)
    return PhasePosterior(post.grid, logd, post.shots_absorbed + len(outcomes))


def sequential_posterior(outcomes, inp, grid_size=DEFAULT_GRID, cache=None):
    post = uniform_prior(grid_size)
    cache = _cache_for(post, inp, cache)
    for o in outcomes:
        post = bayes_update(post, o, inp, cache)
    return post


@dataclass(frozen=True)
class PosteriorStats:
    mean: float
    sd: float
    map_estimate: float
    credible_interval: tuple
    unimodal: bool
    n_modes: int
    level: float = 0.68

    @property
    def half_width(self):
        return 0.5 * (self.credible_interval[1] - self.credible_interval[0])

    def to_json(self):
        rec = asdict(self)
        rec["credible_interval"] = list(self.credible_interval)
        return json.dumps(rec, sort_keys=True)


def count_modes(density, prominence=PROMINENCE):
    """Strict local maxima whose prominence exceeds ``prominence`` x peak.

    The density is padded with zeros so maxima at phi = 0 or pi count;
    flat-topped maxima (plateaus) are not strict and do not count.
    """
    top = float(np.max(density))
    if top <= 0:
        return 0
    padded = np.concatenate([[0.0], density, [0.0]])
    peaks, props = find_peaks(padded, prominence=prominence * top, plateau_size=1)
    return int(np.count_nonzero(props["plateau_sizes"] == 1))


def _map_estimate(grid, d):
    i = int(np.argmax(d))
    if 0 < i < len(d) - 1:
        denom = d[i - 1] - 2.0 * d[i] + d[i + 1]
        if denom < 0:
            h = grid[1] - grid[0]
            shift = 0.5 * (d[i - 1] - d[i + 1]) / denom
            return float(grid[i] + h * min(max(shift, -0.5), 0.5))
    return float(grid[i])


def posterior_stats(post, level=0.68, prominence=PROMINENCE):
    if not 0.0 < level < 1.0:
        raise DomainError(f"credible level must lie in (0, 1), got {level!r}")
    grid, d = post.grid, post.density
    mean = float(trapezoid(grid * d, grid))
    var = float(trapezoid((grid - mean) ** 2 * d, grid))
    cdf = cumulative_trapezoid(d, grid, initial=0.0)
    cdf /= cdf[-1]
    tail = 0.5 * (1.0 - level)
    lo = float(np.interp(tail, cdf, grid))
    hi = float(np.interp(1.0 - tail, cdf, grid))
    n_modes = count_modes(d, prominence)
    return PosteriorStats(mean, math.sqrt(max(var, 0.0)), _map_estimate(grid, d),
                          (lo, hi), n_modes == 1, n_modes, level)


def half_sample_mode(samples):
    """Robust mode by repeated halving to the shortest window of ceil(k/2) points.

    Ties between equally short windows go to the leftmost one.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    if x.size == 0:
        raise DomainError("half-sample mode of an empty sample")
    while x.size > 3:
        k = (x.size + 1) // 2
        widths = x[k - 1:] - x[: x.size - k + 1]
        i = int(np.argmin(widths))
        x = x[i:i + k]
    if x.size == 1:
        return float(x[0])
    if x.size == 2:
        return float(0.5 * (x[0] + x[1]))
    left, right = x[1] - x[0], x[2] - x[1]
    if left < right:
        return float(0.5 * (x[0] + x[1]))
    if right < left:
        return float(0.5 * (x[1] + x[2]))
    return float(x[1])


def nu_opt(fisher, lam, outcomes_per_shot, nu_max):
    """argmin over nu in [1, nu_max] of 1/(nu F) + lam * S**nu; ties go to smaller nu.

    With lam = 0 there is no compute penalty and nu_max is returned.
    """
    if not fisher > 0:
        raise DomainError(f"Fisher information must be positive, got {fisher!r}")
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    if outcomes_per_shot < 2 or nu_max < 1:
        raise DomainError("need S >= 2 and nu_max >= 1")
    nu = np.arange(1, int(nu_max) + 1, dtype=float)
    if lam == 0:
        return int(nu_max)
    with np.errstate(over="ignore"):
        cost = 1.0 / (nu * fisher) + np.exp(math.log(lam) + nu * math.log(outcomes_per_shot))
    return int(nu[int(np.argmin(cost))])


def first_unimodal_nu(outcomes, inp, grid_size=DEFAULT_GRID, cache=None, prominence=PROMINENCE):
    """Smallest prefix length whose posterior is unimodal, or None."""
    if len(outcomes) == 0:
        raise DomainError("need at least one outcome")
    post = uniform_prior(grid_size)
    cache = _cache_for(post, inp, cache)
    for nu, o in enumerate(outcomes, start=1):
        post = bayes_update(post, o, inp, cache)
        if count_modes(post.density, prominence) == 1:
            return nu
    return None
