"""Command-line entry point: ``qmzi <subcommand> [flags]``."""
import argparse
import json
import math
import sys

import numpy as np

from ..errors import QmziError
from .config import ExperimentConfig
from .experiments import (FISHER_COLUMNS, RUN_COLUMNS, SUMMARY_COLUMNS, run_bayes_experiment,
                          run_qfi_sweep, run_rows, summary_rows)
from .io import emit_outputs
from .svg import line_plot


class UsageError(QmziError):
    code = "usage_error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--q", type=float)
    p.add_argument("--parity", choices=["even", "odd", "both"])
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", dest="output_dir")
    p.add_argument("--split", choices=["equal", "all_cat", "all_coherent"])
    p.add_argument("--no-plot", dest="plot", action="store_const", const=False)
    p.add_argument("--skip-unreachable", dest="skip_unreachable", action="store_const", const=True)
    p.add_argument("--strict-truncation", dest="allow_truncation", action="store_const",
                   const=False, help="refuse states whose Fock tail exceeds 1e-10")


def build_parser():
    parser = _Parser(prog="qmzi", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfi-sweep", help="F_Q, F_C versus per-mode mean for several q")
    _add_common(p)
    p.add_argument("--means", type=_floats)
    p.add_argument("--qs", type=_floats)
    p.add_argument("--phi-eval", dest="phi_eval", type=float)

    p = sub.add_parser("qfi-vs-q", help="F_Q, F_C versus q at a fixed total mean")
    _add_common(p)
    p.add_argument("--qs", type=_floats)
    p.add_argument("--mean-total", dest="mean_total", type=float)
    p.add_argument("--phi-eval", dest="phi_eval", type=float)

    p = sub.add_parser("bayes-sim", help="Monte-Carlo Bayesian estimation runs")
    _add_common(p)
    p.add_argument("--mean-totals", dest="mean_totals", type=_floats)
    p.add_argument("--phi-true", dest="phi_true", type=float)
    p.add_argument("--nu", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--grid-G", dest="grid_G", type=int)
    p.add_argument("--workers", type=int)

    p = sub.add_parser("state-inspect", help="print a state record as JSON")
    p.add_argument("--kind", default="coherent",
                   choices=["coherent", "q_coherent", "even", "odd", "q_cat_even", "q_cat_odd"])
    p.add_argument("--q", type=float, default=1.0)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--alpha", type=float)
    group.add_argument("--mean", type=float)
    p.add_argument("--n-max", dest="n_max", type=int, default=30)
    p.add_argument("--allow-truncation", action="store_true")

    p = sub.add_parser("selftest", help="run the oracle-equivalence checks")
    p.add_argument("--seeds", type=int, default=5)
    return parser


_SWEEP_FOR = {"qfi-sweep": "qfi_vs_n", "qfi-vs-q": "qfi_vs_q", "bayes-sim": "bayes"}
_NOT_FIELDS = {"command", "config"}


def config_from_args(args):
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_FIELDS and v is not None}
    overrides["sweep"] = _SWEEP_FOR[args.command]
    return ExperimentConfig.load(args.config, overrides)


def _fisher_plot(rows, x_key, title, xlabel):
    series = {}
    for r in rows:
        name = f"{r['parity']} q={r['q']:g}" if x_key != "q" else r["parity"]
        xs, ys = series.setdefault(name, ([], []))
        xs.append(r[x_key])
        ys.append(r["fq_variance"])
    if x_key != "q":
        ref = sorted({(r["mean_total"], r["f_heisenberg"]) for r in rows})
        series["HL <n>_T^2"] = ([m / 2 if x_key == "mean_a" else m for m, _ in ref],
                                [f for _, f in ref])
    return line_plot(series, title=title, xlabel=xlabel, ylabel="F_Q")


def _bayes_plot(summary):
    series = {}
    for key, label in (("hsm_delta_phi", "HSM delta phi"), ("min_delta_phi", "min delta phi"),
                       ("qcrb", "QCRB"), ("hl_bound", "HL")):
        for r in summary:
            xs, ys = series.setdefault(f"{r['parity']} {label}", ([], []))
            xs.append(r["mean_total"])
            ys.append(r[key])
    return line_plot(series, title="Bayesian phase estimation", xlabel="<n>_T",
                     ylabel="delta phi", log_y=True)


def cmd_sweep(args):
    cfg = config_from_args(args)
    rows, skipped = run_qfi_sweep(cfg)
    x_key = "q" if cfg.sweep == "qfi_vs_q" else "mean_a"
    name = "qfi_vs_q" if cfg.sweep == "qfi_vs_q" else "qfi_vs_n"
    plots = {}
    if cfg.plot and rows:
        xlabel = "q" if x_key == "q" else "<n> per mode"
        plots[name] = _fisher_plot(rows, x_key, "Quantum Fisher information", xlabel)
    extra = {"skipped": [list(s) for s in skipped]}
    paths = emit_outputs({name: (rows, FISHER_COLUMNS)}, cfg, plots, extra)
    return {"status": "ok", "rows": len(rows), "skipped": len(skipped),
            "files": [str(p) for p in paths]}


def cmd_bayes(args):
    cfg = config_from_args(args)
    results, skipped = run_bayes_experiment(cfg)
    summary = summary_rows(results)
    plots = {"bayes": _bayes_plot(summary)} if cfg.plot and summary else {}
    tables = {"bayes_runs": (run_rows(results), RUN_COLUMNS),
              "bayes_summary": (summary, SUMMARY_COLUMNS)}
    extra = {"skipped": [list(s) for s in skipped]}
    paths = emit_outputs(tables, cfg, plots, extra)
    return {"status": "ok", "points": len(summary), "skipped": len(skipped),
            "files": [str(p) for p in paths]}


def cmd_state(args):
    from ..states import build_state, photon_moments, solve_amplitude

    if args.alpha is not None:
        alpha = args.alpha
    else:
        alpha = solve_amplitude(args.mean if args.mean is not None else 1.0, args.q, args.kind,
                                args.n_max)
    st = build_state(args.kind, alpha, args.q, args.n_max, allow_truncation=args.allow_truncation)
    rec = st.to_record()
    mom = photon_moments(st)
    rec["mean"], rec["variance"], rec["mandel_q"] = mom.mean, mom.variance, mom.mandel_q
    return rec


def selftest(seeds=5):
    """Oracle comparisons on small randomized instances; returns a list of check dicts."""
    from ..fisher import cfi, qfi_closed_form, qfi_variance
    from ..mzi import full_distribution, make_input, oracle_distribution
    from ..states import custom_state, q_cat, q_coherent
    from ..wigner import wigner_d_matrix, wigner_d_matrix_oracle

    checks = []

    def record(name, err, tol):
        checks.append({"check": name, "max_error": float(err), "tol": tol, "ok": bool(err < tol)})

    err = 0.0
    for two_j in range(0, 41):
        for phi in (0.3, math.pi / 2, 2.0, 5.5):
            err = max(err, np.max(np.abs(wigner_d_matrix(two_j, phi)
                                         - wigner_d_matrix_oracle(two_j, phi))))
    record("wigner_d_vs_eigh", err, 1e-10)

    err = 0.0
    for s in range(seeds):
        rng = np.random.default_rng(s)
        n = 6
        a = custom_state(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
        b = custom_state(rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))
        inp = make_input(a, b, phase_matched=False)
        phi = float(rng.uniform(0, math.pi))
        err = max(err, np.max(np.abs(full_distribution(phi, inp, 12).p
                                     - oracle_distribution(phi, inp, 12).p)))
    record("likelihood_vs_dense_exponential", err, 1e-9)

    err_q, err_c = 0.0, 0.0
    for q in (0.5, 1.0):
        for parity in ("even", "odd"):
            inp = make_input(q_coherent(0.8, q, 30), q_cat(0.9, q, parity, 30))
            fq = qfi_variance(inp)
            err_q = max(err_q, abs(qfi_closed_form(inp) / fq - 1.0))
            err_c = max(err_c, abs(cfi(inp, 0.7) / fq - 1.0))
    record("qfi_closed_form_vs_variance", err_q, 1e-8)
    record("cfi_equals_qfi", err_c, 1e-6)
    return checks


def cmd_selftest(args):
    checks = selftest(args.seeds)
    ok = all(c["ok"] for c in checks)
    return {"status": "ok" if ok else "failed", "checks": checks}


def _fail(code, message, status=2):
    sys.stderr.write(json.dumps({"error": code, "message": message}) + "\n")
    return status


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        handler = {"qfi-sweep": cmd_sweep, "qfi-vs-q": cmd_sweep, "bayes-sim": cmd_bayes,
                   "state-inspect": cmd_state, "selftest": cmd_selftest}[args.command]
        result = handler(args)
    except QmziError as exc:
        return _fail(exc.code, str(exc))
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        return _fail(type(exc).__name__, str(exc))
    print(json.dumps(result, indent=1))
    return 1 if result.get("status") == "failed" else 0


if __name__ == "__main__":
    sys.exit(main())
