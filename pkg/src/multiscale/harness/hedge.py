"""Single-scale Hedge baseline used to contrast with the multi-scale learner."""

from __future__ import annotations

import math

import numpy as np


def hedge_expected_loss(losses, eta=None):
    """Expected cumulative loss of Hedge on an (n, N) loss matrix.

    Losses are affinely mapped to [0, 1] with the largest range, which is what a
    single-scale method has to do. Default eta = sqrt(8 ln N / n).
    """
    losses = np.asarray(losses, dtype=np.float64)
    n, N = losses.shape
    cmax = float(np.max(np.abs(losses))) or 1.0
    scaled = (losses + cmax) / (2.0 * cmax)
    if eta is None:
        eta = math.sqrt(8.0 * math.log(max(N, 2)) / n)
    cum = np.zeros(N)
    total = []
    for t in range(n):
        z = -eta * cum
        w = np.exp(z - z.max())
        w /= w.sum()
        total.append(float(w @ losses[t]))
        cum += scaled[t]
    return math.fsum(total)


def hedge_weights(cum_losses, eta):
    z = -eta * np.asarray(cum_losses, dtype=np.float64)
    w = np.exp(z - z.max())
    return w / w.sum()
