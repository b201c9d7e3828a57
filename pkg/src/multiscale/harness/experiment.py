"""Regret experiments: expert games, OCO presets and the comparator sweep."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .. import configs
from ..core import LinearLoss, ScaleProfile
from ..errors import ConfigurationError, MultiScaleError
from ..ftpl import GAUSSIAN, FtplState
from ..meta import run_learning, run_oco
from . import configfile
from .report import ReportRow, emit_report
from .streams import (
    expert_losses,
    gen_linear_gradients,
    gen_matrix_stream,
    gen_pca_stream,
    gen_supervised_stream,
)

PRESETS = ("experts",) + tuple(configs.PRESETS)


@dataclass
class ExperimentConfig:
    """What to run. ``params`` go to the preset builder, ``adversary`` to the stream."""

    preset: str = "experts"
    n: int = 500
    d: int = 5
    seeds: tuple = (0,)
    params: dict = field(default_factory=dict)
    adversary: dict = field(default_factory=dict)
    comparators: tuple = ()
    perturbation: str = GAUSSIAN
    out: str = "results"
    stem: str = "report"
    workers: int = 1

    def __post_init__(self):
        self.seeds = tuple(int(s) for s in np.atleast_1d(self.seeds))
        if not self.seeds:
            raise ConfigurationError("need at least one seed")
        if self.n < 1:
            raise ConfigurationError("horizon must be >= 1")
        if self.preset not in PRESETS:
            raise ConfigurationError(f"unknown preset {self.preset!r}; choose from {PRESETS}")
        self.comparators = tuple(float(c) for c in np.atleast_1d(self.comparators)) if len(
            np.atleast_1d(self.comparators)) else ()

    # -- flat config file round trip

    def to_mapping(self):
        m = {"preset": self.preset, "n": self.n, "d": self.d, "seeds": list(self.seeds),
             "perturbation": self.perturbation, "out": self.out, "stem": self.stem, "workers": self.workers}
        if self.comparators:
            m["comparators"] = list(self.comparators)
        for k, v in self.params.items():
            m[f"params.{k}"] = v
        for k, v in self.adversary.items():
            m[f"adversary.{k}"] = v
        return m

    @classmethod
    def from_mapping(cls, m):
        m = dict(m)
        params = {k[7:]: m.pop(k) for k in list(m) if k.startswith("params.")}
        adversary = {k[10:]: m.pop(k) for k in list(m) if k.startswith("adversary.")}
        known = {f.name for f in fields(cls)}
        unknown = set(m) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys {sorted(unknown)}")
        return cls(params=params, adversary=adversary, **m)

    def dumps(self):
        return configfile.dumps(self.to_mapping())

    @classmethod
    def loads(cls, text):
        return cls.from_mapping(configfile.loads(text))

    @classmethod
    def load(cls, path):
        return cls.from_mapping(configfile.load(path))


# ------------------------------------------------------------------ builders


def build_spec(cfg: ExperimentConfig) -> configs.ConfigSpec:
    P = dict(cfg.params)
    n = cfg.n
    if cfg.preset == "banach":
        return configs.banach_nested_config(P.get("L", 1.0), P.get("lambda", 1.0), n, P.get("max_experts"),
                                            p=P.get("p", 2.0), dimension=cfg.d)
    if cfg.preset == "lp_grid":
        L = P.get("L", 1.0)
        spec = configs.lp_grid_config(P.get("delta", 0.25), cfg.d, lambda p: L, n, P.get("max_experts"))
        return replace(spec, dimension=cfg.d)
    if cfg.preset == "pca":
        return configs.pca_config(cfg.d, n)
    if cfg.preset == "mmw":
        return configs.mmw_config(cfg.d, n, P.get("max_experts"))
    if cfg.preset == "mkl":
        names = P.get("kernels", "linear")
        names = names.split() if isinstance(names, str) else list(names)
        ks = []
        for name in names:
            if name == "rbf":
                ks.append((("rbf", {"gamma": float(P.get("gamma", 1.0))}), 1.0))
            elif name == "poly":
                k = configs.make_kernel("poly", degree=int(P.get("degree", 2)))
                ks.append((k, k.bound))
            else:
                ks.append((("linear", {}), 1.0))
        return configs.mkl_config(ks, n, P.get("max_experts"), dimension=cfg.d)
    raise ConfigurationError(f"preset {cfg.preset!r} has no handle grid")


def shape_value(r, n, L=1.0, lam=1.0):
    """(r + 1) sqrt(n ln((r + 1) L n) / lam), the nested-ball oracle shape."""
    return (r + 1.0) * math.sqrt(n * math.log((r + 1.0) * L * n) / lam)


def best_in_ball(G, r, p=2.0):
    """argmin of <G, w> over the l_p ball of radius r."""
    G = np.asarray(G, dtype=np.float64)
    q = p / (p - 1.0)
    nq = np.linalg.norm(G, q)
    if nq == 0:
        return np.zeros_like(G)
    return -r * np.sign(G) * np.abs(G) ** (q - 1.0) / nq ** (q - 1.0)


# ----------------------------------------------------------------- one seed


def _cumulative_regret(alg, comps):
    """Running regret columns: alg is (n,), comps is (n, K)."""
    return np.cumsum(alg)[:, None] - np.cumsum(comps, axis=0)


def _run_experts(cfg, seed):
    P = cfg.params
    c = np.atleast_1d(np.asarray(P.get("scales", [1.0, 10.0]), dtype=np.float64))
    prior = P.get("prior")
    profile = ScaleProfile.uniform(c) if prior is None else ScaleProfile(c, prior)
    kind = cfg.adversary.get("kind", "random")
    G = expert_losses(kind, c, cfg.n, seed=seed)
    st = FtplState(profile, cfg.n, mode=cfg.perturbation, seed=seed)
    chosen, _ = st.play(G)
    alg = G[np.arange(cfg.n), chosen]
    labels = [f"expert{i}" for i in range(c.size)]
    reg = _cumulative_regret(alg, G)
    bounds = st.B[chosen]
    cert = reg[-1] - st.B
    return labels, chosen, alg, reg, bounds, cert, st.B, {}


def _oco_stream(cfg, seed, spec):
    A = cfg.adversary
    if cfg.preset in ("banach", "lp_grid"):
        Gm = gen_linear_gradients(cfg.d, cfg.n, L=A.get("L", cfg.params.get("L", 1.0)),
                                  beta=A.get("beta", 0.0), noise_scale=A.get("noise_scale", 1.0),
                                  alternation=A.get("alternation", 0.0), seed=seed)
        return [LinearLoss(g) for g in Gm], Gm
    if cfg.preset == "pca":
        losses, Ys = gen_pca_stream(cfg.d, cfg.n, strength=A.get("strength", 0.8), seed=seed)
        return losses, Ys
    if cfg.preset == "mmw":
        losses = gen_matrix_stream(cfg.d, cfg.n, seed=seed, alternating=bool(A.get("alternating", False)))
        return losses, [f.Y for f in losses]
    raise ConfigurationError(f"no OCO stream for preset {cfg.preset!r}")


def _oco_comparators(cfg, spec, data):
    """Comparator decisions and labels for the sweep."""
    if cfg.preset in ("banach", "lp_grid"):
        G = np.sum(data, axis=0)
        p = cfg.params.get("p", 2.0) if cfg.preset == "banach" else 2.0
        norms = cfg.comparators or (0.1, 1.0, 10.0, 100.0)
        return [f"norm={r:g}" for r in norms], [best_in_ball(G, r, p) for r in norms], list(norms)
    S = np.sum(data, axis=0)
    ev, V = np.linalg.eigh(0.5 * (S + S.T))
    if cfg.preset == "pca":
        ks = [h.params["k"] for h in spec.handles]
        comps = [V[:, -k:] @ V[:, -k:].T for k in ks]  # best rank-k projections
        return [f"rank={k}" for k in ks], comps, [float(k) for k in ks]
    radii = cfg.comparators or tuple(float(h.R) for h in spec.handles[:4])
    v = V[:, 0]
    top = np.outer(v, v) if ev[0] < 0 else np.zeros_like(S)
    return [f"trace={r:g}" for r in radii], [r * top for r in radii], list(radii)


def _run_meta(cfg, seed):
    spec = build_spec(cfg)
    state = spec.register(cfg.d, seed=seed, perturbation=cfg.perturbation)
    extra = {}
    if spec.mode == "supervised":
        A = cfg.adversary
        rng = np.random.default_rng(seed + 7919)
        target = A.get("target_norm", 0.5) * rng.standard_normal(cfg.d) / math.sqrt(cfg.d)
        stream = gen_supervised_stream(cfg.d, cfg.n, target=target, label_noise=A.get("label_noise", 0.1),
                                       seed=seed)
        run_learning(state, stream)
        raw = state.raw_ledger.expert_rows
        labels = [h.name for h in spec.handles]
        comps_raw = raw
    else:
        losses, data = _oco_stream(cfg, seed, spec)
        run_oco(state, losses)
        labels, comps, norms = _oco_comparators(cfg, spec, data)
        comps_raw = np.array([[f.evaluate(w) for w in comps] for f in losses])
        extra["comparator_norms"] = norms
    chosen = np.array([r[1] for r in state.raw_ledger.round_losses], dtype=np.int64)
    alg = np.array([r[2] for r in state.raw_ledger.round_losses])
    reg = _cumulative_regret(alg, comps_raw)
    B = state.ftpl.B
    cert = state.ledger.total_loss - state.ledger.sub_losses - B
    return labels, chosen, alg, reg, B[chosen], cert, B, extra


def run_seed(cfg: ExperimentConfig, seed):
    """Play one seed; returns (rows, per-seed summary) or raises a package error."""
    runner = _run_experts if cfg.preset == "experts" else _run_meta
    labels, chosen, alg, reg, bounds, cert, B, extra = runner(cfg, seed)
    rows = [
        ReportRow(seed, t + 1, int(chosen[t]), float(alg[t]), tuple(float(x) for x in reg[t]), float(bounds[t]))
        for t in range(cfg.n)
    ]
    out = {
        "seed": seed,
        "total_loss": math.fsum(alg),
        "final_regret": [float(x) for x in reg[-1]],
        "certificate": [float(x) for x in cert],
        "max_certificate": float(np.max(cert)),
        "bounds": [float(x) for x in B],
    }
    out.update(extra)
    return labels, rows, out


def _safe_seed(args):
    cfg, seed = args
    try:
        return seed, run_seed(cfg, seed), None
    except (MultiScaleError, ValueError, ArithmeticError) as exc:
        return seed, None, f"{type(exc).__name__}: {exc}"


def _mean_se(x):
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        return math.nan, math.nan
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(x.mean()), se


def run_experiment(cfg: ExperimentConfig, write=True):
    """Run every seed, then write ``<out>/<stem>.csv`` and ``.json``.

    A seed that raises a package error is recorded under ``failures`` and skipped.
    Returns (summary, paths).
    """
    jobs = [(cfg, s) for s in cfg.seeds]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_safe_seed, jobs))
    else:
        results = [_safe_seed(j) for j in jobs]
    results.sort(key=lambda r: r[0])

    labels, rows, per_seed, failures = None, [], [], {}
    for seed, res, err in results:
        if err is not None:
            failures[str(seed)] = err
            continue
        labels, seed_rows, summ = res
        rows.extend(seed_rows)
        per_seed.append(summ)

    summary = {"config": cfg.to_mapping(), "comparators": labels or [], "seeds": per_seed,
               "failures": failures}
    if per_seed:
        cert = np.array([s["certificate"] for s in per_seed])
        mc = [s["max_certificate"] for s in per_seed]
        m, se = _mean_se(mc)
        summary["certificate_stats"] = {
            "mean_max_certificate": m,
            "stderr": se,
            "passes": bool(m <= 1.0 + 3.0 * se),
            "per_expert_mean": cert.mean(axis=0).tolist(),
        }
        if "comparator_norms" in per_seed[0] and cfg.preset in ("banach", "lp_grid"):
            summary["fitted_constants"] = sweep_summary(cfg, per_seed)
    paths = ()
    if write:
        paths = emit_report(rows, summary, cfg.out, cfg.stem, comparator_labels=labels or [])
    return summary, paths


def sweep_summary(cfg, per_seed):
    """Seed-averaged regret against each comparator norm and its ratio to the oracle shape."""
    norms = per_seed[0]["comparator_norms"]
    regs = np.array([s["final_regret"] for s in per_seed])
    mean = regs.mean(axis=0)
    se = regs.std(axis=0, ddof=1) / math.sqrt(len(regs)) if len(regs) > 1 else np.zeros_like(mean)
    L = float(cfg.params.get("L", 1.0))
    lam = float(cfg.params.get("lambda", 1.0))
    shapes = np.array([shape_value(r, cfg.n, L, lam) for r in norms])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = mean / shapes  # shape is 0 at n = 1, norm 0
    pos = ratio[ratio > 0]
    spread = float(pos.max() / pos.min()) if pos.size == ratio.size else math.inf
    return {
        "norms": list(norms),
        "mean_regret": mean.tolist(),
        "stderr": se.tolist(),
        "shape": shapes.tolist(),
        "ratio": ratio.tolist(),
        "fitted_constant": float(ratio.max()),
        "spread": spread,
    }


def sweep(cfg: ExperimentConfig, norms=(0.1, 1.0, 10.0, 100.0), write=True):
    """Comparator-grid oracle-inequality report for a nested-ball preset."""
    if cfg.preset not in ("banach", "lp_grid"):
        raise ConfigurationError("the comparator sweep needs the banach or lp_grid preset")
    limit = math.exp(min(cfg.n, 700))
    capped = tuple(min(float(r), limit) for r in norms)
    cfg = replace(cfg, comparators=capped, stem=cfg.stem if cfg.stem != "report" else "sweep")
    return run_experiment(cfg, write=write)
