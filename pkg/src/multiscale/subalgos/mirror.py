"""Online mirror descent over norm balls and scaled simplices."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError

REGULARIZERS = ("l2", "lp", "entropy")


def lp_norm(w, p):
    return float(np.linalg.norm(np.ravel(w), p))


def _lp_link(w, p):
    """Gradient of 0.5 * ||w||_p^2."""
    nrm = lp_norm(w, p)
    if nrm == 0.0:
        return np.zeros_like(w)
    return nrm ** (2.0 - p) * np.sign(w) * np.abs(w) ** (p - 1.0)


class MirrorDescent:
    """Mirror descent with Bregman projection onto a radius-``radius`` set.

    ``l2`` and ``lp`` use the regularizer 0.5 * ||w||_p^2 on the l_p ball (p = 2
    for ``l2``); its Bregman projection onto the ball is radial scaling.
    ``entropy`` runs exponentiated gradient on {w >= 0, sum(w) = radius}.

    Set ``record=True`` to keep the (w_t, g_t) trace for regret certificates.
    """

    def __init__(self, dim, eta, radius, regularizer="l2", p=2.0, record=False):
        if regularizer not in REGULARIZERS:
            raise ConfigurationError(f"unknown regularizer {regularizer!r}")
        if eta <= 0 or radius <= 0:
            raise ConfigurationError("eta and radius must be positive")
        if regularizer == "l2":
            p = 2.0
        if regularizer == "lp" and not 1.0 < p <= 2.0:
            raise ConfigurationError(f"l_p regularizer needs 1 < p <= 2, got {p}")
        self.dim = int(dim)
        self.eta = float(eta)
        self.radius = float(radius)
        self.regularizer = regularizer
        self.p = float(p)
        if regularizer == "entropy":
            self.q = math.inf
            self.strong_convexity = 1.0 / self.radius
            self.w = np.full(self.dim, self.radius / self.dim)
        else:
            self.q = self.p / (self.p - 1.0)
            self.strong_convexity = self.p - 1.0
            self.w = np.zeros(self.dim)
        self.trace = [] if record else None

    def predict(self):
        return self.w.copy()

    def norm(self, w):
        return lp_norm(w, 1.0 if self.regularizer == "entropy" else self.p)

    def dual_norm(self, g):
        return lp_norm(g, self.q)

    def regularizer_value(self, w):
        w = np.asarray(w, dtype=np.float64)
        if self.regularizer == "entropy":
            pos = w > 0
            return float(np.sum(w[pos] * np.log(w[pos] * self.dim / self.radius)))
        return 0.5 * self.norm(w) ** 2

    def project(self, w):
        if self.regularizer == "entropy":
            return self.radius * w / w.sum()
        nrm = self.norm(w)
        if nrm <= self.radius:
            return w
        return w * (self.radius / nrm)

    def update(self, g):
        g = np.asarray(g, dtype=np.float64).reshape(self.dim)
        if not np.all(np.isfinite(g)):
            raise ValueError("gradient must be finite")
        if self.trace is not None:
            self.trace.append((self.w.copy(), g.copy()))
        if not np.any(g):
            return self
        if self.regularizer == "entropy":
            logits = np.log(self.w) - self.eta * g
            self.w = self.project(np.exp(logits - logits.max()))
        elif self.p == 2.0:
            self.w = self.project(self.w - self.eta * g)
        else:
            theta = _lp_link(self.w, self.p) - self.eta * g
            self.w = self.project(_lp_link(theta, self.q))
        return self


def md_step(state: MirrorDescent, g) -> MirrorDescent:
    return state.update(g)


def md_regret_certificate(trace, comparator, state: MirrorDescent):
    """Both sides of the mirror-descent regret inequality on a recorded trace.

    lhs = sum_t <w_t - w, g_t>
    rhs = eta / (2 lambda) * sum_t ||g_t||_*^2 + R(w) / eta
    """
    u = np.asarray(comparator, dtype=np.float64)
    if state.norm(u) > state.radius * (1 + 1e-12):
        raise ConfigurationError("comparator lies outside the decision set")
    lhs = math.fsum(float(np.dot(w - u, g)) for w, g in trace)
    sq = math.fsum(state.dual_norm(g) ** 2 for _, g in trace)
    rhs = state.eta / (2.0 * state.strong_convexity) * sq + state.regularizer_value(u) / state.eta
    return lhs, rhs


class LinearPredictor:
    """Supervised wrapper: predicts <w, x> and feeds d loss / d yhat * x to mirror descent."""

    def __init__(self, md: MirrorDescent):
        self.md = md

    def predict(self, x):
        return float(np.dot(self.md.w, x))

    def update(self, x, grad):
        self.md.update(grad * np.asarray(x, dtype=np.float64))
        return self
