"""Vectorized numpy implementations of the hot kernels."""

import numpy as np


def saddle_primal(c, a):
    """Exact minimizer of ``<p,c> + max_i(a_i - 2 p_i c_i)`` over the simplex.

    For a fixed epigraph level s the cheapest feasible p puts the lower bounds
    ``max(0, (a_i - s) / 2c_i)`` on each coordinate and the leftover mass on the
    cheapest expert, so the problem reduces to a convex piecewise-linear search
    over s. Returns ``(p, s)``.
    """
    c = np.asarray(c, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    # work relative to max(a): the problem is shift-equivariant and this keeps
    # the optimizer bitwise identical under exact shifts
    top = a.max()
    a = a - top
    order = np.argsort(-a, kind="stable")
    a_desc = a[order]
    half_inv = 0.5 / c[order]

    # smallest feasible level: sum_i max(0, (a_i - s)/2c_i) == 1
    levels = (np.cumsum(a_desc * half_inv) - 1.0) / np.cumsum(half_inv)
    nxt = np.append(a_desc[1:], -np.inf)
    m = int(np.argmax(levels >= nxt))
    s_min = levels[m]

    # right derivative of the level objective: 1 - sum_{a_i > s} (c_i - cmin)/2c_i
    c_min = c.min()
    slope_w = (c - c_min) / (2.0 * c)
    asc = np.argsort(a, kind="stable")
    a_asc = a[asc]
    suffix = np.append(np.cumsum(slope_w[asc][::-1])[::-1], 0.0)
    cand = np.concatenate(([s_min], np.unique(a_asc[a_asc > s_min])))
    active = suffix[np.searchsorted(a_asc, cand, side="right")]
    k = int(np.argmax(1.0 - active >= 0.0))
    s = cand[k]

    p = np.maximum(0.0, (a - s) / (2.0 * c))
    j = int(np.argmin(c))
    p[j] += 1.0 - p.sum()
    if p[j] < 0.0:
        p[j] = 0.0
        p /= p.sum()
    return p, s + top


def saddle_dual(c, a):
    """Best lower bound ``max_mu <mu,a> + min_i c_i(1 - 2 mu_i)`` over the simplex."""
    c = np.asarray(c, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    c_min = c.min()
    order = np.argsort(-a, kind="stable")
    a_desc = a[order]
    c_desc = c[order]
    m = np.arange(1, a.size + 1, dtype=np.float64)
    nu = (m - 2.0) / np.cumsum(1.0 / c_desc)
    vals = nu + 0.5 * (np.cumsum(a_desc) - nu * np.cumsum(a_desc / c_desc))
    vals = vals[nu <= c_min]
    best = vals.max() if vals.size else -np.inf

    cap = 0.5 * (1.0 - c_min / c_desc)
    if cap.sum() >= 1.0:
        before = np.concatenate(([0.0], np.cumsum(cap)[:-1]))
        mu = np.clip(np.minimum(cap, 1.0 - before), 0.0, None)
        best = max(best, c_min + float(mu @ a_desc))
    return float(best)


def closed_form(c, a, p):
    """Inner supremum over the loss box for a fixed p."""
    return float(np.dot(p, c) + np.max(a - 2.0 * p * c))


def sample_index(p, u):
    """Inverse-CDF draw in ascending index order."""
    cdf = np.cumsum(p)
    i = int(np.searchsorted(cdf, u, side="right"))
    if i >= p.size:
        i = int(np.flatnonzero(p > 0.0)[-1])
    return i


def play_expert_game(c, B, losses, tails, uniforms):
    """Run the perturbed-leader game on a fixed loss matrix.

    Row t of ``tails`` is the perturbation drawn for round t and ``uniforms[t]``
    drives the expert draw. Returns ``(chosen, probs)``.
    """
    c = np.asarray(c, dtype=np.float64)
    n, N = losses.shape
    chosen = np.empty(n, dtype=np.int64)
    probs = np.empty((n, N))
    G = np.zeros(N)
    comp = np.zeros(N)
    base = c - B
    for t in range(n):
        a = base - (G + comp) + 4.0 * tails[t] * c
        p, _ = saddle_primal(c, a)
        probs[t] = p
        chosen[t] = sample_index(p, uniforms[t])
        # Neumaier compensated accumulation
        x = losses[t]
        tot = G + x
        comp += np.where(np.abs(G) >= np.abs(x), (G - tot) + x, (x - tot) + G)
        G = tot
    return chosen, probs


def _sign_table(N):
    bits = (np.arange(2**N)[:, None] >> np.arange(N)[None, :]) & 1
    return 1.0 - 2.0 * bits


def lemma_sides(W, C, lhs_scale, rhs_scale):
    """Both sides of the perturbation inequality for a batch of (w, c) rows.

    lhs = sup_sigma E_eps max_i (w_i + lhs_scale * eps * sigma_i * c_i)
    rhs = E_sigma max_i (w_i + rhs_scale * sigma_i * c_i)
    """
    W = np.atleast_2d(np.asarray(W, dtype=np.float64))
    C = np.atleast_2d(np.asarray(C, dtype=np.float64))
    S = _sign_table(W.shape[1])
    sc = S[None, :, :] * C[:, None, :]
    up = (W[:, None, :] + lhs_scale * sc).max(axis=2)
    down = (W[:, None, :] - lhs_scale * sc).max(axis=2)
    lhs = (0.5 * (up + down)).max(axis=1)
    rhs = (W[:, None, :] + rhs_scale * sc).max(axis=2).mean(axis=1)
    return lhs, rhs
