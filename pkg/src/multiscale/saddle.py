"""The per-round min-max problem of the perturbed leader and its LP solution.

For fixed coefficients the learner solves

    min_{p in simplex} <p, c> + max_i (a_i - 2 p_i c_i)

which is the inner supremum over the loss box |g_i| <= c_i written in closed
form. Its epigraph form is the linear program

    minimize <p, c> + s   s.t.   s >= a_i - 2 p_i c_i  for all i,  p in simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import ScaleProfile, SimplexWeights
from .errors import ConfigurationError, DimensionError, SolverError

EXACT_SMALL_MAX_N = 6


@dataclass(frozen=True)
class SaddleProblem:
    c: np.ndarray
    a: np.ndarray
    tail: np.ndarray | None = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=np.float64).reshape(-1)
        a = np.asarray(self.a, dtype=np.float64).reshape(-1)
        if c.shape != a.shape:
            raise DimensionError(f"len(a)={a.size} but len(c)={c.size}")
        if np.any(c < 1.0):
            raise ConfigurationError("saddle scales must be >= 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a", a)

    @property
    def n_experts(self):
        return self.c.size


@dataclass(frozen=True)
class SaddleSolution:
    p: SimplexWeights
    value: float
    accuracy: float


def build_saddle_coefficients(G_prev, tails, profile: ScaleProfile, B) -> SaddleProblem:
    """a[i] = c_i - G_prev[i] + 4 * tails[i] * c_i - B[i]."""
    c = profile.c
    G_prev = np.asarray(G_prev, dtype=np.float64).reshape(-1)
    tails = np.asarray(tails, dtype=np.float64).reshape(-1)
    B = np.asarray(B, dtype=np.float64).reshape(-1)
    if not (G_prev.size == tails.size == B.size == c.size):
        raise DimensionError(
            f"lengths differ: G={G_prev.size}, tails={tails.size}, B={B.size}, c={c.size}"
        )
    a = c - G_prev + 4.0 * tails * c - B
    return SaddleProblem(c=c, a=a, tail=tails.copy())


def closed_form_value(problem: SaddleProblem, p) -> float:
    """<p, c> + max_i (a_i - 2 p_i c_i): the exact supremum over the loss box."""
    p = np.asarray(getattr(p, "p", p), dtype=np.float64)
    if p.shape != problem.c.shape:
        raise DimensionError("weights and problem have different sizes")
    return float(kernels.closed_form(problem.c, problem.a, p))


def default_epsilon(n, c) -> float:
    """Solver accuracy 1 / (sqrt(n) * max_i c_i)."""
    return 1.0 / (math.sqrt(n) * float(np.max(c)))


def _rounding_slack(problem):
    scale = max(1.0, float(np.max(np.abs(problem.a))), float(np.max(problem.c)))
    return 16.0 * problem.n_experts * np.finfo(float).eps * scale


def solve(problem: SaddleProblem, epsilon: float) -> SaddleSolution:
    """Solve the min-max problem to additive accuracy ``epsilon``.

    The optimizer is found exactly by a breakpoint search over the epigraph
    level; the returned ``accuracy`` is the gap to a dual lower bound, so it is
    a certificate rather than an estimate.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    c, a = problem.c, problem.a
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(c))):
        raise ConfigurationError("saddle coefficients must be finite")

    p, _ = kernels.saddle_primal(c, a)
    value = float(kernels.closed_form(c, a, p))
    lower = float(kernels.saddle_dual(c, a))
    gap = max(0.0, value - lower)
    if not math.isfinite(gap) or gap > epsilon + _rounding_slack(problem):
        raise SolverError(
            f"certified gap {gap!r} exceeds requested accuracy {epsilon!r}", p=p, gap=gap
        )
    return SaddleSolution(p=SimplexWeights(p), value=value, accuracy=gap)


def solve_exact_small(problem: SaddleProblem) -> SaddleSolution:
    """Exact optimum by enumerating every basic solution of the epigraph LP.

    Variables are (p_1..p_N, s). A vertex makes N of the 2N inequalities
    (``s + 2 c_i p_i >= a_i`` and ``p_i >= 0``) tight together with the simplex
    equality. Ties between optimal vertices go to the lexicographically
    smallest support.
    """
    N = problem.n_experts
    if N > EXACT_SMALL_MAX_N:
        raise ConfigurationError(f"exact enumeration supports N <= {EXACT_SMALL_MAX_N}, got {N}")
    c, a = problem.c, problem.a

    rows = []
    rhs = []
    for i in range(N):  # s + 2 c_i p_i >= a_i
        r = np.zeros(N + 1)
        r[i] = 2.0 * c[i]
        r[N] = 1.0
        rows.append(r)
        rhs.append(a[i])
    for i in range(N):  # p_i >= 0
        r = np.zeros(N + 1)
        r[i] = 1.0
        rows.append(r)
        rhs.append(0.0)
    rows = np.array(rows)
    rhs = np.array(rhs)
    eq = np.append(np.ones(N), 0.0)

    combos = np.array(list(itertools.combinations(range(2 * N), N)), dtype=np.int64)
    M = np.empty((len(combos), N + 1, N + 1))
    b = np.empty((len(combos), N + 1))
    M[:, :N, :] = rows[combos]
    M[:, N, :] = eq
    b[:, :N] = rhs[combos]
    b[:, N] = 1.0
    ok = np.abs(np.linalg.det(M)) > 1e-12
    X = np.linalg.solve(M[ok], b[ok][..., None])[..., 0]

    scale = max(1.0, float(np.abs(a).max()), float(c.max()))
    tol = 1e-9 * scale
    feasible = np.all(X @ rows.T - rhs >= -tol, axis=1)
    X = X[feasible]
    objective = X[:, :N] @ c + X[:, N]
    best = objective.min()
    cands = X[objective <= best + tol]

    def key(x):
        support = tuple(int(i) for i in np.flatnonzero(x[:N] > 1e-12))
        return (support, tuple(-x[:N]))

    x = min(cands, key=key)
    p = np.clip(x[:N], 0.0, None)
    p /= p.sum()
    return SaddleSolution(p=SimplexWeights(p), value=closed_form_value(problem, p), accuracy=0.0)
