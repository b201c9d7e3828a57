"""Command line entry point: ``multiscale {run,verify,sweep,presets}``.

The exit code is 0 exactly when every check the command ran passed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from .. import configs
from ..errors import MultiScaleError
from . import configfile
from .experiment import PRESETS, ExperimentConfig, run_experiment, sweep
from .verify import (
    MaximalInequalitySpec,
    random_grid,
    sign_sum_process,
    verify_lemma_n2,
    verify_maximal_inequality,
    verify_perturbation_theorem,
)

log = logging.getLogger("multiscale")

SWEEP_MAX_SPREAD = 4.0


def _experiment_from_args(args):
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig(preset=args.preset, n=args.n, d=args.d)
    if args.seed is not None:
        cfg = replace(cfg, seeds=tuple(args.seed))
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    if args.max_experts is not None:
        cfg = replace(cfg, params={**cfg.params, "max_experts": args.max_experts})
    return cfg


def cmd_run(args):
    cfg = _experiment_from_args(args)
    summary, paths = run_experiment(cfg)
    ok = not summary["failures"] and summary.get("certificate_stats", {}).get("passes", False)
    for seed, err in summary["failures"].items():
        print(f"FAIL seed {seed}: {err}")
    st = summary.get("certificate_stats")
    if st:
        print(f"{'PASS' if st['passes'] else 'FAIL'} certificate: mean max = {st['mean_max_certificate']:.4g}"
              f" (se {st['stderr']:.3g}) <= 1 + 3 se")
    for p in paths:
        print(f"wrote {p}")
    return 0 if ok else 1


def run_verify_suites(samples, seed, grid_size=1000, suites=("lemma", "perturbation", "maximal")):
    rng = np.random.default_rng(seed)
    reports = []
    if "lemma" in suites:
        reports.append(verify_lemma_n2(*random_grid(2, grid_size, rng)))
    if "perturbation" in suites:
        for N in (1, 2, 3, 4):
            reports.append(verify_perturbation_theorem(*random_grid(N, grid_size, rng)))
    if "maximal" in suites:
        for k in range(10):
            N = int(rng.integers(1, 6))
            c = 2.0 ** rng.integers(0, 6, size=N)
            pi = rng.dirichlet(np.ones(N))
            n = int(rng.integers(5, 200))
            try:
                spec = MaximalInequalitySpec.from_sign_sums(c, n, pi)
            except MultiScaleError:
                continue  # random spec broke the precondition
            rep = verify_maximal_inequality(spec, sign_sum_process(c, n), samples=samples, seed=seed + k)
            rep.name = f"maximal_inequality[{k}]"
            reports.append(rep)
    return reports


def cmd_verify(args):
    suites = ("lemma", "perturbation", "maximal") if args.suite == "all" else (args.suite,)
    seed = args.seed[0] if args.seed else 0
    reports = run_verify_suites(args.samples, seed, args.grid_size, suites)
    for r in reports:
        print(r.line())
    return 0 if all(r.passed for r in reports) else 1


def cmd_sweep(args):
    cfg = _experiment_from_args(args)
    if not args.config and cfg.preset == "experts":
        cfg = replace(cfg, preset="banach")
    summary, paths = sweep(cfg, norms=tuple(args.norms))
    fc = summary.get("fitted_constants")
    if fc is None:
        print("FAIL sweep: no seed completed")
        return 1
    for r, reg, ratio in zip(fc["norms"], fc["mean_regret"], fc["ratio"]):
        print(f"norm {r:>8g}  mean regret {reg:12.5g}  ratio {ratio:.4g}")
    ok = fc["spread"] <= SWEEP_MAX_SPREAD and not summary["failures"]
    print(f"{'PASS' if ok else 'FAIL'} sweep: max/min ratio = {fc['spread']:.3g} (limit {SWEEP_MAX_SPREAD:g}),"
          f" fitted constant = {fc['fitted_constant']:.4g}")
    for p in paths:
        print(f"wrote {p}")
    return 0 if ok else 1


def _preset_spec(name, n, d, max_experts):
    if name == "banach":
        return configs.banach_nested_config(1.0, 1.0, n, max_experts, dimension=d)
    if name == "lp_grid":
        return configs.lp_grid_config(0.25, d, lambda p: 1.0, n, max_experts)
    if name == "pca":
        return configs.pca_config(d, n)
    if name == "mmw":
        return configs.mmw_config(d, n, max_experts)
    return configs.mkl_config([(("linear", {}), 1.0)], n, max_experts, dimension=d)


def cmd_presets(args):
    if args.emit is None:
        for name in PRESETS:
            print(name)
        return 0
    spec = _preset_spec(args.emit, args.n, args.d, args.max_experts)
    text = configfile.dump_spec(spec)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="multiscale", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, experiment=True):
        p.add_argument("--seed", type=int, nargs="+", help="one or more seeds")
        p.add_argument("--out", help="output directory (file for presets --emit)")
        p.add_argument("--max-experts", type=int, help="truncate nested grids to this many radii")
        if experiment:
            p.add_argument("--config", help="flat key = value experiment file")
            p.add_argument("--preset", choices=PRESETS, default="experts")
            p.add_argument("--n", type=int, default=500, help="horizon")
            p.add_argument("--d", type=int, default=5, help="dimension")

    p = sub.add_parser("run", help="play an experiment and write CSV/JSON reports")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run the inequality verification suites")
    common(p, experiment=False)
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples per spec")
    p.add_argument("--grid-size", type=int, default=1000)
    p.add_argument("--suite", choices=("all", "lemma", "perturbation", "maximal"), default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="comparator-norm sweep for the nested-ball preset")
    common(p)
    p.add_argument("--norms", type=float, nargs="+", default=[0.1, 1.0, 10.0, 100.0])
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("presets", help="list presets or emit one as a config file")
    common(p, experiment=False)
    p.add_argument("--emit", choices=tuple(configs.PRESETS))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--samples", type=int, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (MultiScaleError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
