"""Preset expert grids: nested norm balls, l_p grids, online PCA budgets,
trace-norm balls and multiple-kernel classes.

A ConfigSpec stores handle blueprints rather than live learners, so the same
spec can be instantiated for any dimension and any number of seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .meta import OCO, SUPERVISED, SubAlgorithmHandle, register
from .subalgos import KernelOGD, LinearPredictor, MatrixEG, MatrixMW, MirrorDescent, make_kernel

KINDS = ("md", "meg", "mmw", "kernel")


@dataclass(frozen=True)
class HandleBlueprint:
    """Recipe for one sub-algorithm.

    ``params`` by kind:
      md     : regularizer, p, eta
      meg    : k, eta
      mmw    : eta
      kernel : kernel (name), kernel_params (dict), bound, eta
    """

    kind: str
    R: float
    L: float
    params: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown handle kind {self.kind!r}")

    def instantiate(self, d, supervised=False) -> SubAlgorithmHandle:
        P = self.params
        if self.kind == "md":
            # the radius of the decision set is the handle radius itself
            learner = MirrorDescent(d, P["eta"], self.R, P.get("regularizer", "l2"), P.get("p", 2.0))
            if supervised:
                learner = LinearPredictor(learner)
        elif self.kind == "meg":
            learner = MatrixEG(d, int(P["k"]), P["eta"])
        elif self.kind == "mmw":
            learner = MatrixMW(d, self.R, P["eta"])
        else:
            kern = make_kernel(P["kernel"], **P.get("kernel_params", {}))
            learner = KernelOGD(kern, self.R / P["bound"], P["eta"], dim=d)
        return SubAlgorithmHandle(self.R, self.L, learner, name=self.name)


@dataclass(frozen=True)
class ConfigSpec:
    name: str
    handles: tuple
    prior: np.ndarray
    horizon: int
    notes: str = ""
    mode: str = OCO
    dimension: int | None = None

    def __post_init__(self):
        prior = np.asarray(self.prior, dtype=np.float64).reshape(-1)
        if prior.size != len(self.handles):
            raise ConfigurationError(f"prior has {prior.size} entries for {len(self.handles)} handles")
        if np.any(prior <= 0) or abs(math.fsum(prior) - 1.0) > 1e-12:
            raise ConfigurationError("prior must be strictly positive and sum to 1")
        prior.setflags(write=False)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "handles", tuple(self.handles))

    @property
    def n_experts(self):
        return len(self.handles)

    @property
    def radii(self):
        return np.array([h.R for h in self.handles])

    def build_handles(self, d=None):
        d = self.dimension if d is None else d
        if d is None:
            raise ConfigurationError(f"config {self.name!r} needs a dimension")
        sup = self.mode == SUPERVISED
        return [h.instantiate(d, supervised=sup) for h in self.handles]

    def register(self, d=None, *, seed=0, **kw):
        return register(self.build_handles(d), self.prior, self.horizon, mode=self.mode, seed=seed, **kw)


def _grid_size(n, max_experts):
    if max_experts is None:
        return n + 1
    if max_experts < 1:
        raise ConfigurationError("max_experts must be >= 1")
    return int(max_experts)


def banach_nested_config(L, lam, n, max_experts=None, *, p=2.0, mode=OCO, dimension=None) -> ConfigSpec:
    """Nested l_p balls of radius e^{i-1}, mirror descent with eta_i = (R_i / L) sqrt(lam / n)."""
    if not lam > 0 or n < 1 or not L > 0:
        raise ConfigurationError("need L > 0, lambda > 0 and n >= 1")
    N = _grid_size(n, max_experts)
    reg = "l2" if p == 2.0 else "lp"
    hs = []
    for i in range(N):
        R = math.exp(i)
        eta = (R / L) * math.sqrt(lam / n)
        hs.append(HandleBlueprint("md", R, L, {"regularizer": reg, "p": p, "eta": eta}, name=f"ball{i}"))
    return ConfigSpec("banach", hs, np.full(N, 1.0 / N), n, notes=f"R_i = e^(i-1), i < {N}",
                      mode=mode, dimension=dimension)


def lp_exponents(delta, d):
    """Grid p_k = 1 + delta + min((k-1) eps, 1 - delta) with eps = 1 / ln d."""
    if not 0 < delta < 1:
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta}")
    if not d > 1:
        raise ConfigurationError("d must exceed 1")
    eps = 1.0 / math.log(d)
    K = math.ceil((1.0 - delta) / eps) + 1
    return np.array([1.0 + delta + min(k * eps, 1.0 - delta) for k in range(K)]), eps


def lp_grid_config(delta, d, L_of_p, n, max_experts=None, *, mode=OCO) -> ConfigSpec:
    """Grid over (p_k, R_j): l_{p_k} balls of radius e^{j-1}.

    ``L_of_p`` maps p to the Lipschitz constant in the l_p norm (callable or dict).
    ``max_experts`` truncates the radius grid of every p_k.
    """
    ps, eps = lp_exponents(delta, d)
    J = _grid_size(n, max_experts)
    hs = []
    for k, pk in enumerate(ps):
        Lk = float(L_of_p(pk) if callable(L_of_p) else L_of_p[pk])
        lam = pk - 1.0
        for j in range(J):
            R = math.exp(j)
            eta = (R / Lk) * math.sqrt(lam / n)
            hs.append(HandleBlueprint("md", R, Lk, {"regularizer": "lp", "p": float(pk), "eta": eta},
                                      name=f"p{k}_ball{j}"))
    N = len(hs)
    dim = int(round(d)) if float(d).is_integer() else None
    return ConfigSpec("lp_grid", hs, np.full(N, 1.0 / N), n,
                      notes=f"p in {np.round(ps, 6).tolist()}, eps = {eps!r}", mode=mode, dimension=dim)


def pca_budgets(d):
    """Trace budgets round(e^{i-1}) for i <= ceil(ln(d/2)) + 1, clipped to d // 2, deduplicated."""
    if d < 2:
        raise ConfigurationError("online PCA needs d >= 2")
    count = math.ceil(math.log(d / 2.0)) + 1
    out = []
    for i in range(count):
        k = min(max(1, round(math.exp(i))), d // 2)
        if k not in out:
            out.append(k)
    return out


def pca_config(d, n) -> ConfigSpec:
    """Matrix EG on capped spectraplexes tr W = k for the budgets of ``pca_budgets``."""
    ks = pca_budgets(d)
    eta = math.sqrt(math.log(d) / n)
    hs = [HandleBlueprint("meg", float(k), 1.0, {"k": k, "eta": eta}, name=f"rank{k}") for k in ks]
    return ConfigSpec("pca", hs, np.full(len(hs), 1.0 / len(hs)), n,
                      notes=f"trace budgets {ks}", dimension=d)


def mmw_config(d, n, max_experts=None) -> ConfigSpec:
    """Matrix multiplicative weights on trace-norm balls of radius 2^{i-1}."""
    if d < 1:
        raise ConfigurationError("d must be >= 1")
    N = _grid_size(n, max_experts)
    eta = math.sqrt(math.log(d + 1.0) / n)
    hs = [HandleBlueprint("mmw", float(2**i), 1.0, {"eta": eta}, name=f"trace{i}") for i in range(N)]
    return ConfigSpec("mmw", hs, np.full(N, 1.0 / N), n, notes=f"r_i = 2^(i-1), i < {N}", dimension=d)


def mkl_config(kernels, n, max_experts=None, *, L=1.0, dimension=None) -> ConfigSpec:
    """Nested RKHS balls of radius e^{j-1} for each kernel; prior proportional to 1 / (n k^2).

    ``kernels`` is a list of (kernel, B_k) pairs, where a kernel is a ``Kernel``
    instance or a (name, params) pair.
    """
    if not kernels:
        raise ConfigurationError("need at least one kernel")
    J = _grid_size(n, max_experts)
    hs, weights = [], []
    for k, (kern, Bk) in enumerate(kernels, start=1):
        if isinstance(kern, tuple):
            kname, kparams = kern
        else:
            kname, kparams = kern.name, kern.params()
        make_kernel(kname, **kparams)  # validate early
        if not Bk > 0:
            raise ConfigurationError("kernel bound must be positive")
        for j in range(J):
            rho = math.exp(j)
            eta = rho / (L * Bk * math.sqrt(n))
            params = {"kernel": kname, "kernel_params": dict(kparams), "bound": float(Bk), "eta": eta}
            hs.append(HandleBlueprint("kernel", rho * Bk, L, params, name=f"k{k}_ball{j}"))
            weights.append(1.0 / (n * k * k))
    w = np.array(weights)
    return ConfigSpec("mkl", hs, w / w.sum(), n, notes=f"{len(kernels)} kernels x {J} radii",
                      mode=SUPERVISED, dimension=dimension)


def comparator_range(L, n, c, gamma):
    """exp((L n / c)^(1/gamma)); math.inf when it overflows."""
    if not (c > 0 and gamma > 0):
        raise ConfigurationError("need c > 0 and gamma > 0")
    try:
        return math.exp((L * n / c) ** (1.0 / gamma))
    except OverflowError:
        return math.inf


PRESETS = {
    "banach": banach_nested_config,
    "lp_grid": lp_grid_config,
    "pca": pca_config,
    "mmw": mmw_config,
    "mkl": mkl_config,
}
