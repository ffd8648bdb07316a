"""Command-line experiment runner.

Subcommands: identities | mc | scan | sobolev | synth | kernels.
Exit codes: 0 success, 1 identity/acceptance failure, 2 invalid config,
3 numerical failure.
"""

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import fields, theory
from .config import ConfigError, ExperimentConfig, load_config, parse_config
from .identities import default_functions, run_identities
from .io import ensure_dir, manifest, write_csv, write_json, write_pairing_table
from .spectra import EigensolverError
from .stats import normality_test, unbiased_cov
from .testfn import SmoothBump

log = logging.getLogger("logdet_lab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _functions(cfg):
    if cfg.functions:
        return cfg.functions
    return [SmoothBump(0.0, 0.3, cfg.interval), SmoothBump(0.4, 0.3, cfg.interval)]


def _finish(cfg, name, outputs, extra=None):
    write_json(os.path.join(cfg.output_dir, "manifest.json"),
               manifest(cfg, name, outputs + ["manifest.json"], extra))


def cmd_identities(cfg):
    tol = cfg.option("tolerance")
    fns = cfg.functions or default_functions(cfg.interval, cfg.option("halfwidth", 0.5))
    results = run_identities(n_max=cfg.option("n_max"), tolerance=tol, functions=fns,
                             s4_values=cfg.option("s4_values", (0.0, -0.8192, 0.75)))
    failed = [r for r in results if not r.passed]
    write_json(os.path.join(cfg.output_dir, "identities.json"),
               {"passed": not failed, "identities": [r.to_dict() for r in results]})
    _finish(cfg, "identities", ["identities.json"])
    for r in results:
        log.info("%-20s residual %.3e  tol %.1e  %s", r.name, r.residual, r.tolerance,
                 "ok" if r.passed else "FAIL")
    if failed:
        print(f"identity failed: {failed[0].name} ({failed[0].detail})", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _diagnostics(table):
    s4 = table.s4
    out = {}
    for name, target in (("tr_h", 2.0), ("tr_h2", 4.0 + 2.0 * s4)):
        col = table.diagnostics[name]
        var, se = unbiased_cov(col, col)
        out[name] = {"variance": var, "stderr": se, "target": target,
                     "within_3se": bool(abs(var - target) <= 3.0 * se)}
    return out


def _normality(table, reports):
    out = {}
    for rep in reports:
        cols = table.values(rep.field)
        entries = []
        for j, name in enumerate(rep.names):
            x = cols[:, j] - cols[:, j].mean()
            if table.replicas < 500 or not rep.theory[j, j] > 0:
                entries.append({"function": name, "skipped": True})
                continue
            entries.append({"function": name, **normality_test(x, rep.theory[j, j]).to_dict()})
        out[rep.field] = entries
    return out


def cmd_mc(cfg):
    fns = _functions(cfg)
    table = fields.run_experiment(cfg.spec, fns, cfg.replicas, cfg.seed, cfg.threads)
    n_max = int(cfg.option("n_max", theory.DEFAULT_N_MAX))
    reports = [fields.center_and_covary(table, f, n_max) for f in fields.FIELDS]
    diag = _diagnostics(table)
    normal = _normality(table, reports)
    write_pairing_table(table, os.path.join(cfg.output_dir, "pairings.csv"))
    write_json(os.path.join(cfg.output_dir, "covariance.json"), {r.field: r.to_dict() for r in reports})
    write_json(os.path.join(cfg.output_dir, "normality.json"), normal)
    write_json(os.path.join(cfg.output_dir, "diagnostics.json"), diag)
    _finish(cfg, "mc", ["pairings.csv", "covariance.json", "normality.json", "diagnostics.json"])
    ok = (all(r.within(3.0).all() for r in reports)
          and all(d["within_3se"] for d in diag.values())
          and all(e.get("passed", True) for v in normal.values() for e in v))
    if cfg.option("strict", False) and not ok:
        return EXIT_FAIL
    return EXIT_OK


def _scan_table(cfg, K):
    modes = cfg.dirichlet(K)
    if cfg.option("synthetic", False):
        return fields.synthetic_power_law_table(modes, cfg.replicas, cfg.seed)
    return fields.run_experiment(cfg.spec, modes, cfg.replicas, cfg.seed, cfg.threads)


def cmd_scan(cfg):
    k_range = tuple(int(k) for k in cfg.option("k_range", (2, 32)))
    if len(k_range) != 2 or not 1 <= k_range[0] < k_range[1]:
        raise ConfigError(f"k_range {list(k_range)} must hold two distinct increasing modes")
    table = _scan_table(cfg, max(k_range[1], int(cfg.option("K_max", k_range[1]))))
    slopes = {}
    outputs = []
    for f in fields.FIELDS:
        scan = fields.variance_scan(table, f, k_range)
        name = f"scan_{f}.csv"
        write_csv(os.path.join(cfg.output_dir, name), ["k", "variance", "stderr"], scan.rows())
        outputs.append(name)
        slopes[f] = scan.to_dict()
    write_json(os.path.join(cfg.output_dir, "slopes.json"), slopes)
    _finish(cfg, "scan", outputs + ["slopes.json"])
    return EXIT_OK


def cmd_sobolev(cfg):
    r = float(cfg.option("r", 0.5))
    K = int(cfg.option("K_max", 64))
    sizes = [int(n) for n in cfg.option("sizes", [cfg.spec.N])]
    rows, summary = [], {}
    for N in sizes:
        sub = parse_config({**cfg.raw, "ensemble": {**cfg.raw.get("ensemble", {}), "N": N}},
                           seed=cfg.seed, output_dir=cfg.output_dir, threads=cfg.threads)
        table = fields.run_experiment(sub.spec, cfg.dirichlet(K), cfg.replicas, cfg.seed, cfg.threads)
        for f in fields.FIELDS:
            est = fields.sobolev_norm_sq(table, r, K, f)
            rows.append((N, f, r, K, est.mean, est.stderr, est.tail_proxy))
            summary.setdefault(f, {})[str(N)] = est.to_dict()
    for f, by_n in summary.items():
        means = [v["mean"] for v in by_n.values()]
        by_n["max_over_min"] = max(means) / min(means) if min(means) > 0 else math.inf
    write_csv(os.path.join(cfg.output_dir, "sobolev.csv"),
              ["N", "field", "r", "K_max", "mean", "stderr", "tail_proxy"], rows)
    write_json(os.path.join(cfg.output_dir, "sobolev.json"), summary)
    _finish(cfg, "sobolev", ["sobolev.csv", "sobolev.json"])
    return EXIT_OK


def cmd_synth(cfg):
    fns = _functions(cfg)
    s4 = float(cfg.option("s4", cfg.spec.s4))
    n_max = int(cfg.option("n_max", theory.DEFAULT_N_MAX))
    X = theory.synth_pairings(fns, s4, n_max, cfg.replicas, cfg.seed, cfg.threads)
    from .stats import covariance_matrix
    cov, se = covariance_matrix(X)
    th = fields.theory_matrix("log", fns, s4, n_max)
    within = np.abs(cov - th) <= 3.0 * se
    write_csv(os.path.join(cfg.output_dir, "synth_pairings.csv"), ["replica", "function_id", "value"],
              ((i, j, X[i, j]) for i in range(X.shape[0]) for j in range(X.shape[1])))
    write_json(os.path.join(cfg.output_dir, "synth_covariance.json"),
               {"s4": s4, "n_max": n_max, "functions": [f.name for f in fns],
                "mode2_weight": theory.limit_field_weights(s4, n_max)[1],
                "covariance": cov, "stderr": se, "theory": th, "within_3se": within})
    _finish(cfg, "synth", ["synth_pairings.csv", "synth_covariance.json"])
    return EXIT_OK if within.all() else EXIT_FAIL


def cmd_kernels(cfg):
    n = int(cfg.option("grid", 21))
    I = cfg.interval
    grid = np.linspace(I.a, I.b, n)
    s4 = cfg.spec.s4
    klog, kcnt = theory.KernelSpec("log", s4), theory.KernelSpec("cnt", s4)
    rows = [(E, Ep, theory.kernel_eval(klog, E, Ep), theory.kernel_eval(kcnt, E, Ep))
            for E in grid for Ep in grid if E != Ep]
    write_csv(os.path.join(cfg.output_dir, "kernels.csv"), ["E", "E_prime", "K_log", "K_cnt"], rows)
    _finish(cfg, "kernels", ["kernels.csv"])
    return EXIT_OK


COMMANDS = {
    "identities": cmd_identities,
    "mc": cmd_mc,
    "scan": cmd_scan,
    "sobolev": cmd_sobolev,
    "synth": cmd_synth,
    "kernels": cmd_kernels,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--threads", type=int, help="worker cap (default: LOGDET_LAB_THREADS or 1)")
    common.add_argument("--seed", type=int, help="master seed (overrides config)")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="logdet-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    overrides = {"seed": args.seed, "output_dir": args.out, "threads": args.threads}
    try:
        cfg = load_config(args.config, **overrides) if args.config else parse_config({}, **overrides)
        if cfg.threads is None:
            cfg.threads = int(os.environ.get("LOGDET_LAB_THREADS", "1"))
        ensure_dir(cfg.output_dir)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigensolverError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
