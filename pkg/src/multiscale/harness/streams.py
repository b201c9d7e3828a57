"""Oblivious loss streams: linear OCO losses, supervised examples and
multi-scale expert loss matrices. Every stream is a pure function of its seed."""

from __future__ import annotations

import numpy as np

from ..core import LinearLoss, MatrixLinearLoss, pca_loss
from ..errors import ConfigurationError

ADVERSARIES = ("random", "best-expert", "switching", "large-better", "alternating", "two-scale")


def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ConfigurationError("direction must be nonzero")
    return v / nrm


def gen_linear_gradients(d, n, L=1.0, bias_direction=None, beta=0.0, noise_scale=1.0, seed=0,
                         alternation=0.0, q=2.0):
    """(n, d) gradients g_t = -beta u + alternation (-1)^t u + noise_scale xi_t.

    xi_t is a uniformly random sign times u plus isotropic Gaussian noise in the
    other directions, so the stream has no drift beyond ``beta``. Rows are rescaled
    so that ||g_t||_q <= L.
    """
    rng = np.random.default_rng(seed)
    u = _unit(np.eye(d)[0] if bias_direction is None else bias_direction)
    signs = rng.choice([-1.0, 1.0], size=n)
    iso = rng.standard_normal((n, d)) / np.sqrt(d)
    iso -= np.outer(iso @ u, u)
    xi = signs[:, None] * u + iso
    t = np.arange(1, n + 1)
    G = -beta * u + alternation * ((-1.0) ** t)[:, None] * u + noise_scale * xi
    norms = np.linalg.norm(G, q, axis=1)
    G *= np.minimum(1.0, L / np.where(norms > 0, norms, 1.0))[:, None]
    return G


def gen_linear_stream(d, n, L=1.0, bias_direction=None, beta=0.0, noise_scale=1.0, seed=0, **kw):
    """Linear losses f_t(w) = <g_t, w>; see ``gen_linear_gradients``."""
    G = gen_linear_gradients(d, n, L, bias_direction, beta, noise_scale, seed, **kw)
    return [LinearLoss(g) for g in G]


def unit_ball_points(n, d, rng):
    x = rng.standard_normal((n, d))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x * rng.random(n)[:, None] ** (1.0 / d)


def gen_supervised_stream(d, n, target=None, label_noise=0.0, seed=0, y_range=1.0):
    """Pairs (x_t, y_t): x_t uniform in the unit ball, y_t = f*(x_t) + noise clipped to y_range.

    ``target`` is a weight vector (linear target), a callable, or None for zero.
    """
    rng = np.random.default_rng(seed)
    X = unit_ball_points(n, d, rng)
    if target is None:
        f = np.zeros(n)
    elif callable(target):
        f = np.array([float(target(x)) for x in X])
    else:
        f = X @ np.asarray(target, dtype=np.float64)
    y = np.clip(f + label_noise * rng.standard_normal(n), -y_range, y_range)
    return [(X[t], float(y[t])) for t in range(n)]


def gen_pca_stream(d, n, spike=None, strength=0.8, seed=0):
    """Online PCA losses <I - W, Y_t> with Y_t = x_t x_t^T, ||x_t|| <= 1, planted along ``spike``."""
    rng = np.random.default_rng(seed)
    u = _unit(np.eye(d)[0] if spike is None else spike)
    Ys = []
    for _ in range(n):
        x = strength * rng.choice([-1.0, 1.0]) * u + (1 - strength) * rng.standard_normal(d) / np.sqrt(d)
        x /= max(1.0, np.linalg.norm(x))
        Ys.append(np.outer(x, x))
    return [pca_loss(Y) for Y in Ys], Ys


def gen_matrix_stream(d, n, seed=0, alternating=False):
    """Linear matrix losses <W, Y_t> with symmetric ||Y_t||_spectral <= 1."""
    rng = np.random.default_rng(seed)
    out = []
    e1 = np.zeros((d, d))
    e1[0, 0] = 1.0
    for t in range(n):
        if alternating:
            Y = e1 * (1.0 if t % 2 == 0 else -1.0)
        else:
            A = rng.standard_normal((d, d))
            Y = 0.5 * (A + A.T)
            Y /= np.abs(np.linalg.eigvalsh(Y)).max()
        out.append(MatrixLinearLoss(Y))
    return out


def expert_losses(kind, c, n, seed=0):
    """(n, N) expert loss matrix with |g_t[i]| <= c_i.

    random       : independent uniform signs times c_i
    best-expert  : signs, but expert N//2 is biased toward -c
    switching    : the biased expert changes every n // 4 rounds
    large-better : large-range experts drift negative, small ones positive
    alternating  : deterministic alternation with opposite phase in each half
    two-scale    : N = 2; expert 1 uniform signs, expert 2 is +c_2 w.p. 3/4 else -c_2
    """
    c = np.asarray(c, dtype=np.float64)
    N = c.size
    rng = np.random.default_rng(seed)
    sg = rng.choice([-1.0, 1.0], size=(n, N))
    if kind == "random":
        G = sg
    elif kind == "best-expert":
        G = sg
        b = N // 2
        G[:, b] = np.where(rng.random(n) < 0.7, -1.0, 1.0)
    elif kind == "switching":
        G = sg
        block = max(1, n // 4)
        for t in range(n):
            b = (t // block) % N
            G[t, b] = -1.0 if rng.random() < 0.8 else 1.0
    elif kind == "large-better":
        rank = np.argsort(np.argsort(c)) / max(1, N - 1)
        prob_neg = 0.35 + 0.3 * rank
        G = np.where(rng.random((n, N)) < prob_neg, -1.0, 1.0)
    elif kind == "alternating":
        t = np.arange(n)[:, None]
        phase = (np.arange(N) >= N // 2)[None, :]
        G = np.where((t % 2 == 0) ^ phase, 1.0, -1.0)
    elif kind == "two-scale":
        if N != 2:
            raise ConfigurationError("two-scale adversary needs exactly two experts")
        G = np.empty((n, 2))
        G[:, 0] = sg[:, 0]
        G[:, 1] = np.where(rng.random(n) < 0.75, 1.0, -1.0)
    else:
        raise ConfigurationError(f"unknown adversary {kind!r}; choose from {ADVERSARIES}")
    return G * c[None, :]
