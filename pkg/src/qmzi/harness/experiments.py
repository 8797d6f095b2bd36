"""QFI sweeps and the Monte-Carlo Bayesian estimation experiment."""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..bayes import (LikelihoodCache, half_sample_mode, posterior_stats, sequential_posterior,
                     first_unimodal_nu, uniform_prior)
from ..errors import DeficiencyError, SolverError
from ..fisher import (cfi, heisenberg_reference, qcrb_delta_phi, qfi_closed_form,
                      qfi_variance)
from ..mzi import full_distribution, make_input, sample_counts
from ..states import q_cat, q_coherent, solve_amplitude

RNG_ALGORITHM = "numpy.Philox4x64-10+SeedSequence(seed,spawn_key=(run_index,))/v1"

FISHER_COLUMNS = ["q", "mean_a", "mean_b", "parity", "fq_closed", "fq_variance", "fc",
                  "phi_eval", "mean_total", "f_heisenberg", "alpha_a", "alpha_b",
                  "tail_a", "tail_b"]
RUN_COLUMNS = ["parity", "mean_total", "run_index", "delta_phi", "map_estimate", "mean_estimate",
               "half_width", "unimodal_at", "seed_used"]
SUMMARY_COLUMNS = ["parity", "mean_total", "mean_a", "mean_b", "fc", "fq", "qcrb", "hl_bound",
                   "hsm_delta_phi", "ci68_lo", "ci68_hi", "min_delta_phi",
                   "hsm_half_width", "runs", "nu"]


def build_input(q, parity, mean_a, mean_b, n_max, *, allow_truncation=True, swap=False):
    """Coherent (mode a) x cat (mode b) input hitting the requested per-mode means."""
    try:
        alpha_a = solve_amplitude(mean_a, q, "coherent", n_max)
        alpha_b = solve_amplitude(mean_b, q, parity, n_max)
    except SolverError as exc:
        raise SolverError(f"(q={q}, mean_a={mean_a}, mean_b={mean_b}, parity={parity}): {exc}") from exc
    a = q_coherent(alpha_a, q, n_max, allow_truncation=allow_truncation)
    b = q_cat(alpha_b, q, parity, n_max, allow_truncation=allow_truncation)
    return make_input(a, b, swap=swap)


def fisher_row(q, parity, mean_a, mean_b, cfg):
    inp = build_input(q, parity, mean_a, mean_b, cfg.n_max,
                      allow_truncation=cfg.allow_truncation, swap=cfg.swap)
    total = mean_a + mean_b
    return {
        "q": float(q), "mean_a": float(mean_a), "mean_b": float(mean_b), "parity": parity,
        "fq_closed": qfi_closed_form(inp), "fq_variance": qfi_variance(inp),
        "fc": cfi(inp, cfg.phi_eval), "phi_eval": float(cfg.phi_eval),
        "mean_total": float(total), "f_heisenberg": heisenberg_reference(total),
        "alpha_a": abs(inp.mode_a.alpha), "alpha_b": abs(inp.mode_b.alpha),
        "tail_a": inp.mode_a.tail_bound, "tail_b": inp.mode_b.tail_bound,
    }


def run_qfi_sweep(cfg):
    """FisherReport rows over the configured (q, mean) grid, sorted deterministically.

    qfi_vs_n treats each entry of ``means`` as a per-mode mean; qfi_vs_q
    splits ``mean_total`` across the modes by the split rule.
    """
    rows, skipped = [], []
    if cfg.sweep == "qfi_vs_q":
        total = 20.0 if cfg.mean_total is None else cfg.mean_total
        points = [(q, *cfg.split_means(total)) for q in cfg.qs]
    else:
        points = [(q, m, m) for q in cfg.qs for m in cfg.means]
    for parity in cfg.parities:
        for q, ma, mb in points:
            try:
                rows.append(fisher_row(q, parity, ma, mb, cfg))
            except SolverError:
                if not cfg.skip_unreachable:
                    raise
                skipped.append((parity, q, ma, mb))
    rows.sort(key=lambda r: (r["parity"], r["q"], r["mean_total"], r["mean_a"]))
    return rows, skipped


@dataclass(frozen=True)
class RunSummary:
    run_index: int
    delta_phi: float
    map_estimate: float
    mean_estimate: float
    half_width: float
    unimodal_at: int | None
    seed_used: int


def run_rng(seed, run_index):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(run_index),))
    return np.random.Generator(np.random.Philox(ss)), int(ss.generate_state(1, np.uint64)[0])


def _simulate_runs(args):
    cfg, parity, mean_total, indices = args
    ma, mb = cfg.split_means(mean_total)
    inp = build_input(cfg.q, parity, ma, mb, cfg.n_max,
                      allow_truncation=cfg.allow_truncation, swap=cfg.swap)
    dist = full_distribution(cfg.phi_true, inp)
    if dist.deficiency >= 1e-6:
        raise DeficiencyError(f"deficiency {dist.deficiency:.3g} at <n>_T={mean_total}; raise n_max")
    cache = LikelihoodCache(inp, uniform_prior(cfg.grid_G).grid)
    out = []
    for r in indices:
        rng, seed_used = run_rng(cfg.seed, r)
        if cfg.nu > 0:
            n1, n2 = sample_counts(rng, dist, cfg.nu)
            record = list(zip(n1.tolist(), n2.tolist()))
        else:
            record = []
        post = sequential_posterior(record, inp, cfg.grid_G, cache)
        st = posterior_stats(post)
        first = first_unimodal_nu(record, inp, cfg.grid_G, cache) if record else None
        out.append(RunSummary(r, st.sd, st.map_estimate, st.mean, st.half_width, first, seed_used))
    return out


def run_bayes_experiment(cfg):
    """Per mean_total: ``runs`` independent nu-shot records, posterior stats, aggregate.

    Results are gathered by run index, so the output is the same for any
    number of workers.
    """
    results, skipped = [], []
    for parity, total in [(p, float(t)) for p in cfg.parities for t in cfg.mean_totals]:
        ma, mb = cfg.split_means(total)
        try:
            inp = build_input(cfg.q, parity, ma, mb, cfg.n_max,
                              allow_truncation=cfg.allow_truncation, swap=cfg.swap)
        except SolverError:
            if not cfg.skip_unreachable:
                raise
            skipped.append((parity, cfg.q, ma, mb))
            continue
        fc = cfi(inp, cfg.phi_true)
        fq = qfi_variance(inp)
        indices = list(range(cfg.runs))
        if cfg.workers > 1:
            chunks = [indices[i::cfg.workers] for i in range(cfg.workers)]
            with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
                parts = list(ex.map(_simulate_runs, [(cfg, parity, total, c) for c in chunks if c]))
            runs = sorted((s for p in parts for s in p), key=lambda s: s.run_index)
        else:
            runs = _simulate_runs((cfg, parity, total, indices))
        dphi = np.array([s.delta_phi for s in runs])
        lo, hi = np.quantile(dphi, [0.16, 0.84])
        aggregate = {
            "parity": parity, "mean_total": total, "mean_a": ma, "mean_b": mb, "fc": fc, "fq": fq,
            "qcrb": qcrb_delta_phi(fc, cfg.nu) if cfg.nu > 0 and fc > 0 else None,
            "hl_bound": 1.0 / (math.sqrt(cfg.nu) * total) if cfg.nu > 0 and total > 0 else None,
            "hsm_delta_phi": half_sample_mode(dphi),
            "ci68_lo": float(lo), "ci68_hi": float(hi),
            "min_delta_phi": float(dphi.min()),
            "hsm_half_width": half_sample_mode([s.half_width for s in runs]),
            "runs": cfg.runs, "nu": cfg.nu,
        }
        results.append({"parity": parity, "mean_total": total, "runs": runs,
                        "aggregate": aggregate})
    return results, skipped


def run_rows(results):
    rows = []
    for res in results:
        for s in res["runs"]:
            rows.append({"parity": res["parity"], "mean_total": res["mean_total"], **asdict(s)})
    return rows


def summary_rows(results):
    return [res["aggregate"] for res in results]
