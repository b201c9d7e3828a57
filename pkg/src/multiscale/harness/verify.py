"""Numerical checks of the perturbation inequalities and the maximal inequality.

The perturbation checks enumerate every sign pattern, so they are exact up to
floating point rounding. Convexity of the left side in sigma means the supremum
over the cube [-1, 1]^N is attained at a vertex, which the enumeration covers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..errors import ConfigurationError

ENUM_TOL = 1e-12
MAX_ENUM_N = 4


@dataclass
class VerificationReport:
    name: str
    passed: bool
    max_violation: float
    checked: int
    details: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: checked={self.checked} max_violation={self.max_violation:.3e}"


def random_grid(N, size, rng, w_scale=5.0, c_scale=3.0):
    """Random (w, c) rows: w uniform in [-w_scale, w_scale], c uniform in [0, c_scale]."""
    W = rng.uniform(-w_scale, w_scale, size=(size, N))
    C = rng.uniform(0.0, c_scale, size=(size, N))
    return W, C


def _enumeration_report(name, W, C, lhs_scale, rhs_scale, tol):
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    if W.shape != C.shape:
        raise ConfigurationError("w and c grids must have the same shape")
    if np.any(C < 0):
        raise ConfigurationError("scales must be nonnegative")
    lhs, rhs = kernels.lemma_sides(W, C, float(lhs_scale), float(rhs_scale))
    scale = np.maximum(1.0, np.abs(W).max(axis=1) + np.abs(C).max(axis=1) * rhs_scale)
    viol = lhs - rhs
    worst = int(np.argmax(viol / scale)) if viol.size else 0
    bad = int(np.sum(viol > tol * scale))
    return VerificationReport(
        name=name,
        passed=bad == 0,
        max_violation=float(viol.max()) if viol.size else 0.0,
        checked=int(viol.size),
        details={
            "violations": bad,
            "tolerance": tol,
            "worst_w": W[worst].tolist() if viol.size else [],
            "worst_c": C[worst].tolist() if viol.size else [],
            "min_slack": float((rhs - lhs).min()) if viol.size else 0.0,
        },
    )


def verify_lemma_n2(W, C, tol=ENUM_TOL) -> VerificationReport:
    """sup_sigma E_eps max_i(w_i + eps sigma_i c_i) <= E_sigma max_i(w_i + 2 sigma_i c_i), N = 2."""
    W = np.atleast_2d(W)
    if W.shape[1] != 2:
        raise ConfigurationError("the two-expert lemma needs N = 2")
    return _enumeration_report("lemma_n2", W, C, 1.0, 2.0, tol)


def verify_perturbation_theorem(W, C, tol=ENUM_TOL, max_n=MAX_ENUM_N) -> VerificationReport:
    """sup_sigma E_eps max_i(w_i + 2 eps sigma_i c_i) <= E_sigma max_i(w_i + 4 sigma_i c_i)."""
    W = np.atleast_2d(W)
    if W.shape[1] > max_n:
        raise ConfigurationError(f"enumeration is limited to N <= {max_n}, got {W.shape[1]}")
    return _enumeration_report(f"perturbation_N{W.shape[1]}", W, C, 2.0, 4.0, tol)


@dataclass(frozen=True)
class MaximalInequalitySpec:
    """mgf scales ``h``, exponent ``p_exp`` and prior ``pi``."""

    h: np.ndarray
    p_exp: float
    pi: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64).reshape(-1)
        pi = np.asarray(self.pi, dtype=np.float64).reshape(-1)
        if h.shape != pi.shape:
            raise ConfigurationError("h and pi must have the same length")
        if np.any(h <= 0) or self.p_exp <= 0:
            raise ConfigurationError("need h > 0 and p > 0")
        if np.any(pi <= 0) or abs(math.fsum(pi) - 1.0) > 1e-12:
            raise ConfigurationError("pi must be a strictly positive distribution")
        if np.any(h / pi < math.e):
            i = int(np.argmin(h / pi))
            raise ConfigurationError(f"precondition h/pi >= e fails at index {i}: {h[i] / pi[i]!r}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "pi", pi)

    @classmethod
    def from_sign_sums(cls, c, n, pi):
        """h_i = 4 c_i^2 n, p = 2: the scales of X_i = 2 c_i * (sum of n signs)."""
        c = np.asarray(c, dtype=np.float64)
        return cls(4.0 * c * c * n, 2.0, pi)

    @property
    def thresholds(self):
        p = self.p_exp
        return (2.0 + 1.0 / p) * self.h ** (1.0 / p) * (np.log(self.h) + np.log(1.0 / self.pi)) ** (1.0 - 1.0 / p)

    @property
    def rhs(self):
        return math.fsum(self.pi / self.h)


def sign_sum_process(c, n):
    """Sampler for X_i = 2 c_i sum_{t<=n} sigma_t[i], independent across i."""
    c = np.asarray(c, dtype=np.float64)

    def sample(rng, size):
        heads = rng.binomial(n, 0.5, size=(size, c.size))
        return 2.0 * c * (2.0 * heads - n)

    return sample


def verify_maximal_inequality(spec: MaximalInequalitySpec, process, samples=100_000, seed=0,
                              batch=20_000) -> VerificationReport:
    """Monte Carlo check of E sup_i (X_i - threshold_i) <= sum_i pi_i / h_i.

    Passes when the estimate is at most the right side plus 3 standard errors.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    rng = np.random.default_rng(seed)
    thr = spec.thresholds
    vals = []
    left = samples
    while left:
        m = min(batch, left)
        X = np.asarray(process(rng, m), dtype=np.float64).reshape(m, -1)
        vals.append((X - thr).max(axis=1))
        left -= m
    v = np.concatenate(vals)
    est = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.size))
    rhs = spec.rhs
    return VerificationReport(
        name="maximal_inequality",
        passed=est <= rhs + 3.0 * se,
        max_violation=est - rhs,
        checked=int(v.size),
        details={"estimate": est, "stderr": se, "rhs": rhs, "p": spec.p_exp},
    )
