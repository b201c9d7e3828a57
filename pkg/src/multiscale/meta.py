"""Combine sub-algorithms of different scales through the perturbed-leader core.

Every round each handle proposes a decision (or a prediction), the core picks
one, and all handles receive feedback on the centered loss at their own
iterate. The centered loss vanishes at the origin, so handle i's loss lies in
[-R_i L_i, R_i L_i] and can be fed to the core with range c_i = max(1, R_i L_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AbsoluteLoss,
    LossFunction,
    PredictionLoss,
    RegretLedger,
    ScaleProfile,
    center_loss,
    lift_scales,
)
from .errors import ConfigurationError, DimensionError, ScaleViolation
from .ftpl import GAUSSIAN, FtplState

OCO = "oco"
SUPERVISED = "supervised"
RANGE_TOL = 1e-12


@dataclass
class SubAlgorithmHandle:
    """A sub-algorithm with radius ``R`` and Lipschitz constant ``L`` for its set.

    OCO learners expose ``predict()`` and ``update(grad)``; supervised learners
    expose ``predict(x)`` and ``update(x, dloss)``.
    """

    R: float
    L: float
    learner: object
    name: str = ""

    def __post_init__(self):
        for key in ("R", "L"):
            v = float(getattr(self, key))
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"handle {self.name or '?'}: {key} must be finite and positive")
            setattr(self, key, v)

    @property
    def raw_scale(self):
        return self.R * self.L

    @property
    def scale(self):
        return max(1.0, self.R * self.L)


class MetaState:
    def __init__(self, handles, ftpl: FtplState, mode, loss=None):
        self.handles = list(handles)
        self.ftpl = ftpl
        self.mode = mode
        self.loss = loss
        self.ledger = RegretLedger(len(self.handles))
        self.raw_ledger = RegretLedger(len(self.handles))  # uncentered losses
        self.t = 1

    @property
    def c(self):
        return self.ftpl.profile.c

    def _label(self, i):
        h = self.handles[i]
        return f"handle {i}" + (f" ({h.name})" if h.name else "")

    def _check_range(self, g, what):
        c = self.c
        bad = np.flatnonzero(~(np.abs(g) <= c * (1.0 + RANGE_TOL)))
        if bad.size:
            i = int(bad[0])
            raise ScaleViolation(
                f"round {self.t}: {self._label(i)} has {what} {g[i]!r} outside its declared "
                f"range {c[i]!r} (R={self.handles[i].R!r}, L={self.handles[i].L!r})",
                index=i,
            )


def register(handles, prior=None, n=1, *, mode=OCO, perturbation=GAUSSIAN, seed=0, loss=None,
             epsilon=None) -> MetaState:
    """Build the combiner over ``handles`` with prior ``prior`` (uniform if None)."""
    handles = list(handles)
    if not handles:
        raise ConfigurationError("need at least one sub-algorithm")
    if mode not in (OCO, SUPERVISED):
        raise ConfigurationError(f"mode must be {OCO!r} or {SUPERVISED!r}")
    if prior is None:
        prior = np.full(len(handles), 1.0 / len(handles))
    prior = np.asarray(prior, dtype=np.float64).reshape(-1)
    if prior.size != len(handles):
        raise DimensionError(f"prior has {prior.size} entries for {len(handles)} handles")
    c = lift_scales([h.raw_scale for h in handles])
    profile = ScaleProfile(c, prior)
    if mode == SUPERVISED and loss is None:
        loss = AbsoluteLoss()
    ftpl = FtplState(profile, n, mode=perturbation, seed=seed, epsilon=epsilon)
    return MetaState(handles, ftpl, mode, loss)


def oco_round(state: MetaState, f: LossFunction):
    """Play one round against the convex loss ``f``. Returns (decision, state)."""
    if state.mode != OCO:
        raise ConfigurationError("oco_round needs an OCO meta state")
    decisions = [h.learner.predict() for h in state.handles]
    _, i = state.ftpl.step()
    ft = center_loss(f)
    g = np.array([ft.evaluate(w) for w in decisions])
    state._check_range(g, "centered loss")
    raw = np.array([f.evaluate(w) for w in decisions])
    state.ftpl.observe(g)
    for h, w in zip(state.handles, decisions):
        h.learner.update(ft.subgradient(w))
    state.ledger.record(state.t, i, g[i], g)
    state.raw_ledger.record(state.t, i, raw[i], raw)
    state.t += 1
    return decisions[i], state


def learning_round(state: MetaState, x, y_callback):
    """Predict on context ``x``; ``y_callback`` is the label or a function of the prediction.

    Returns (prediction, state).
    """
    if state.mode != SUPERVISED:
        raise ConfigurationError("learning_round needs a supervised meta state")
    loss: PredictionLoss = state.loss
    preds = np.array([float(h.learner.predict(x)) for h in state.handles])
    radii = np.array([h.R for h in state.handles])
    bad = np.flatnonzero(~(np.abs(preds) <= radii * (1.0 + RANGE_TOL)))
    if bad.size:
        j = int(bad[0])
        raise ScaleViolation(
            f"round {state.t}: {state._label(j)} predicted {preds[j]!r} outside its radius {radii[j]!r}",
            index=j,
        )
    _, i = state.ftpl.step()
    yhat = preds[i]
    y = y_callback(yhat) if callable(y_callback) else y_callback
    y = float(y)
    base = loss(0.0, y)
    raw = np.array([loss(p, y) for p in preds])
    g = raw - base
    state._check_range(g, "centered loss")
    state.ftpl.observe(g)
    for h, p in zip(state.handles, preds):  # ascending index
        h.learner.update(x, loss.derivative(p, y))
    state.ledger.record(state.t, i, g[i], g)
    state.raw_ledger.record(state.t, i, raw[i], raw)
    state.t += 1
    return yhat, state


def run_oco(state: MetaState, losses):
    """Play every loss in order; returns the list of played decisions."""
    return [oco_round(state, f)[0] for f in losses]


def run_learning(state: MetaState, stream):
    return [learning_round(state, x, y)[0] for x, y in stream]
