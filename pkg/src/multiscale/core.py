"""Shared value types, loss functions and regret bookkeeping."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError, ScaleViolation

SCALE_TOL = 1e-12
PRIOR_TOL = 1e-12
SIMPLEX_TOL = 1e-9


class ScaleLiftWarning(UserWarning):
    """A loss range below 1 was raised to 1."""


def _frozen(x):
    arr = np.array(x, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def lift_scales(c):
    """Raise every range below 1 up to 1, warning once per call if any moved."""
    c = np.asarray(c, dtype=np.float64)
    low = np.flatnonzero(c < 1.0)
    if low.size:
        warnings.warn(
            f"loss ranges {c[low].tolist()} at indices {low.tolist()} lifted to 1",
            ScaleLiftWarning,
            stacklevel=2,
        )
    return np.maximum(c, 1.0)


@dataclass(frozen=True)
class ScaleProfile:
    """Per-expert loss ranges ``c`` (each >= 1) and a strictly positive prior ``pi``."""

    c: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        c = _frozen(self.c).reshape(-1)
        pi = _frozen(self.pi).reshape(-1)
        if c.size == 0:
            raise ConfigurationError("scale profile needs at least one expert")
        if c.shape != pi.shape:
            raise DimensionError(f"len(c)={c.size} but len(pi)={pi.size}")
        if not np.all(np.isfinite(c)) or np.any(c < 1.0):
            raise ConfigurationError(f"every scale must be finite and >= 1, got {c}")
        if np.any(pi <= 0.0) or not np.all(np.isfinite(pi)):
            raise ConfigurationError("prior must be strictly positive")
        if abs(math.fsum(pi) - 1.0) > PRIOR_TOL:
            raise ConfigurationError(f"prior sums to {math.fsum(pi)!r}, not 1")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "pi", pi)

    @property
    def n_experts(self):
        return self.c.size

    @classmethod
    def uniform(cls, c):
        c = np.asarray(c, dtype=np.float64).reshape(-1)
        return cls(c, np.full(c.size, 1.0 / c.size))


@dataclass(frozen=True)
class LossVector:
    """One round of expert losses, validated against a scale profile."""

    g: np.ndarray
    profile: ScaleProfile = field(repr=False)

    def __post_init__(self):
        g = _frozen(self.g).reshape(-1)
        c = self.profile.c
        if g.shape != c.shape:
            raise DimensionError(f"loss vector has {g.size} entries, profile has {c.size}")
        bad = np.flatnonzero(~(np.abs(g) <= c * (1.0 + SCALE_TOL)))
        if bad.size:
            i = int(bad[0])
            raise ScaleViolation(
                f"|g[{i}]| = {abs(g[i])!r} exceeds its range c[{i}] = {c[i]!r}", index=i
            )
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class SimplexWeights:
    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p).reshape(-1)
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > SIMPLEX_TOL:
            raise ConfigurationError(f"not a probability vector: {p}")
        object.__setattr__(self, "p", p)

    def __len__(self):
        return self.p.size

    def __getitem__(self, i):
        return self.p[i]


class CompensatedSum:
    """Neumaier-compensated running sum of scalars or equally shaped arrays."""

    def __init__(self, shape=()):
        self._sum = np.zeros(shape)
        self._comp = np.zeros(shape)

    def add(self, x):
        x = np.asarray(x, dtype=np.float64)
        s = self._sum
        t = s + x
        big = np.abs(s) >= np.abs(x)
        self._comp = self._comp + np.where(big, (s - t) + x, (x - t) + s)
        self._sum = t

    @property
    def value(self):
        return self._sum + self._comp


# ---------------------------------------------------------------- losses


def _dual_exponent(p):
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


class LossFunction:
    """Convex loss over a vector or matrix decision space.

    Subclasses implement ``evaluate`` and ``subgradient``; ``lipschitz(p)`` is the
    Lipschitz constant with respect to the l_p norm of the decision (the trace
    norm for matrix losses).
    """

    shape: tuple = ()

    def evaluate(self, w):
        raise NotImplementedError

    def subgradient(self, w):
        raise NotImplementedError

    def lipschitz(self, p=2.0):
        raise NotImplementedError

    def zero(self):
        return np.zeros(self.shape)

    def __call__(self, w):
        return self.evaluate(w)


class LinearLoss(LossFunction):
    """f(w) = <g, w> + offset."""

    def __init__(self, g, offset=0.0):
        self.g = np.asarray(g, dtype=np.float64)
        self.offset = float(offset)
        self.shape = self.g.shape

    def evaluate(self, w):
        return float(np.vdot(self.g, w)) + self.offset

    def subgradient(self, w):
        return self.g.copy()

    def lipschitz(self, p=2.0):
        return float(np.linalg.norm(self.g.ravel(), _dual_exponent(p)))


class AbsoluteDeviationLoss(LossFunction):
    """f(w) = |<x, w> - y|; with ``x = [1.0]`` this is |w - y| on the real line."""

    def __init__(self, x, y):
        self.x = np.asarray(x, dtype=np.float64)
        self.y = float(y)
        self.shape = self.x.shape

    def evaluate(self, w):
        return abs(float(np.dot(self.x, w)) - self.y)

    def subgradient(self, w):
        return np.sign(float(np.dot(self.x, w)) - self.y) * self.x

    def lipschitz(self, p=2.0):
        return float(np.linalg.norm(self.x, _dual_exponent(p)))


class MatrixLinearLoss(LossFunction):
    """f(W) = <W, Y> + offset for a symmetric loss matrix Y."""

    def __init__(self, Y, offset=0.0):
        self.Y = np.asarray(Y, dtype=np.float64)
        if self.Y.ndim != 2 or self.Y.shape[0] != self.Y.shape[1]:
            raise DimensionError("loss matrix must be square")
        self.offset = float(offset)
        self.shape = self.Y.shape

    def evaluate(self, W):
        return float(np.vdot(self.Y, W)) + self.offset

    def subgradient(self, W):
        return self.Y.copy()

    def lipschitz(self, p=1.0):
        # trace-norm Lipschitz constant is the spectral norm of Y
        return float(np.abs(np.linalg.eigvalsh(0.5 * (self.Y + self.Y.T))).max())


def pca_loss(Y):
    """Online PCA loss <I - W, Y> expressed as a matrix-linear loss."""
    Y = np.asarray(Y, dtype=np.float64)
    return MatrixLinearLoss(-Y, offset=float(np.trace(Y)))


class CenteredLoss(LossFunction):
    """f(w) - f(0); subgradients pass through unchanged."""

    def __init__(self, base, offset):
        self.base = base
        self.offset = float(offset)
        self.shape = base.shape

    def evaluate(self, w):
        return self.base.evaluate(w) - self.offset

    def subgradient(self, w):
        return self.base.subgradient(w)

    def lipschitz(self, p=2.0):
        return self.base.lipschitz(p)


def center_loss(f):
    """Shift ``f`` so that it vanishes at the zero decision."""
    try:
        f0 = float(f.evaluate(f.zero()))
    except Exception as exc:  # noqa: BLE001 - any failure here is a config problem
        raise ConfigurationError(f"loss cannot be evaluated at 0: {exc}") from exc
    if not math.isfinite(f0):
        raise ConfigurationError("loss is not finite at 0; the decision set must contain 0")
    if isinstance(f, CenteredLoss):
        return CenteredLoss(f.base, f.offset + f0)
    return CenteredLoss(f, f0)


# ------------------------------------------------- supervised prediction losses


class PredictionLoss:
    """Scalar loss l(yhat, y) with a derivative in the prediction."""

    lipschitz = 1.0

    def __call__(self, yhat, y):
        raise NotImplementedError

    def derivative(self, yhat, y):
        raise NotImplementedError

    def centered(self, yhat, y):
        return self(yhat, y) - self(0.0, y)


class AbsoluteLoss(PredictionLoss):
    def __call__(self, yhat, y):
        return abs(yhat - y)

    def derivative(self, yhat, y):
        return float(np.sign(yhat - y))


class LogisticLoss(PredictionLoss):
    """log(1 + exp(-y * yhat)) for labels in {-1, +1}."""

    def __call__(self, yhat, y):
        return float(np.logaddexp(0.0, -y * yhat))

    def derivative(self, yhat, y):
        return float(-y / (1.0 + np.exp(y * yhat)))


# ------------------------------------------------------------------ ledger


class RegretLedger:
    """Per-round record of a game: chosen index, realized loss, expert losses.

    Totals use exactly rounded summation so they do not depend on record order.
    """

    def __init__(self, n_experts=None):
        self.round_losses = []
        self._expert_rows = []
        self.n_experts = n_experts
        self.comparator_records = []

    def __len__(self):
        return len(self.round_losses)

    def record(self, t, chosen, loss, expert_losses=None):
        self.round_losses.append((int(t), int(chosen), float(loss)))
        if expert_losses is not None:
            row = np.asarray(expert_losses, dtype=np.float64).reshape(-1)
            if self.n_experts is None:
                self.n_experts = row.size
            elif row.size != self.n_experts:
                raise DimensionError("expert loss row has the wrong length")
            self._expert_rows.append(row)

    def add_comparator(self, descriptor, cumulative_loss):
        self.comparator_records.append((descriptor, float(cumulative_loss)))

    @property
    def total_loss(self):
        return math.fsum(r[2] for r in self.round_losses)

    @property
    def sub_losses(self):
        """Cumulative loss of every expert."""
        if not self._expert_rows:
            return np.zeros(self.n_experts or 0)
        rows = np.vstack(self._expert_rows)
        return np.array([math.fsum(col) for col in rows.T])

    @property
    def expert_rows(self):
        if not self._expert_rows:
            return np.zeros((0, self.n_experts or 0))
        return np.vstack(self._expert_rows)


def cumulative_regret(ledger, comparator_loss):
    """Total realized loss minus a comparator's cumulative loss."""
    if len(ledger) == 0:
        raise ValueError("ledger is empty")
    return math.fsum([ledger.total_loss, -float(comparator_loss)])
