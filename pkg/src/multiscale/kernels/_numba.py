"""Loop-based kernels compiled with numba."""

import functools

import numba as nb
import numpy as np

njit = functools.partial(nb.njit, cache=True, nogil=True)


@njit
def saddle_primal(c, a_in):
    N = c.shape[0]
    top = a_in.max()
    a = a_in - top
    order = np.argsort(-a, kind="mergesort")

    # smallest feasible level
    sa = 0.0
    si = 0.0
    s = 0.0
    for m in range(N):
        j = order[m]
        h = 0.5 / c[j]
        sa += a[j] * h
        si += h
        s = (sa - 1.0) / si
        if m == N - 1 or s >= a[order[m + 1]]:
            break

    c_min = c[0]
    jmin = 0
    for i in range(1, N):
        if c[i] < c_min:
            c_min = c[i]
            jmin = i

    # walk right over breakpoints while the level objective still decreases
    while True:
        slope = 1.0
        nxt = np.inf
        for i in range(N):
            if a[i] > s:
                slope -= (c[i] - c_min) / (2.0 * c[i])
                if a[i] < nxt:
                    nxt = a[i]
        if slope >= 0.0 or nxt == np.inf:
            break
        s = nxt

    p = np.empty(N)
    tot = 0.0
    for i in range(N):
        v = (a[i] - s) / (2.0 * c[i])
        p[i] = v if v > 0.0 else 0.0
        tot += p[i]
    p[jmin] += 1.0 - tot
    if p[jmin] < 0.0:
        p[jmin] = 0.0
        tot = 0.0
        for i in range(N):
            tot += p[i]
        for i in range(N):
            p[i] /= tot
    return p, s + top


@njit
def saddle_dual(c, a):
    N = c.shape[0]
    order = np.argsort(-a, kind="mergesort")
    c_min = c[0]
    for i in range(1, N):
        if c[i] < c_min:
            c_min = c[i]

    best = -np.inf
    A = 0.0
    Q = 0.0
    Ic = 0.0
    for m in range(N):
        j = order[m]
        A += a[j]
        Q += a[j] / c[j]
        Ic += 1.0 / c[j]
        nu = (m - 1.0) / Ic
        if nu <= c_min:
            v = nu + 0.5 * (A - nu * Q)
            if v > best:
                best = v

    total = 0.0
    for i in range(N):
        total += 0.5 * (1.0 - c_min / c[i])
    if total >= 1.0:
        left = 1.0
        v = c_min
        for m in range(N):
            j = order[m]
            cap = 0.5 * (1.0 - c_min / c[j])
            take = cap if cap < left else left
            v += take * a[j]
            left -= take
            if left <= 0.0:
                break
        if v > best:
            best = v
    return best


@njit
def closed_form(c, a, p):
    inner = -np.inf
    lin = 0.0
    for i in range(c.shape[0]):
        lin += p[i] * c[i]
        v = a[i] - 2.0 * p[i] * c[i]
        if v > inner:
            inner = v
    return lin + inner


@njit
def sample_index(p, u):
    acc = 0.0
    last = 0
    for i in range(p.shape[0]):
        if p[i] > 0.0:
            last = i
        acc += p[i]
        if u < acc:
            return i
    return last


@njit
def play_expert_game(c, B, losses, tails, uniforms):
    n, N = losses.shape
    chosen = np.empty(n, dtype=np.int64)
    probs = np.empty((n, N))
    G = np.zeros(N)
    comp = np.zeros(N)
    a = np.empty(N)
    for t in range(n):
        for i in range(N):
            a[i] = c[i] - (G[i] + comp[i]) + 4.0 * tails[t, i] * c[i] - B[i]
        p, _ = saddle_primal(c, a)
        probs[t] = p
        chosen[t] = sample_index(p, uniforms[t])
        for i in range(N):
            x = losses[t, i]
            tot = G[i] + x
            if abs(G[i]) >= abs(x):
                comp[i] += (G[i] - tot) + x
            else:
                comp[i] += (x - tot) + G[i]
            G[i] = tot
    return chosen, probs


@njit
def lemma_sides(W, C, lhs_scale, rhs_scale):
    n_rows, N = W.shape
    lhs = np.empty(n_rows)
    rhs = np.empty(n_rows)
    n_sig = 1 << N
    for r in range(n_rows):
        best = -np.inf
        acc = 0.0
        for code in range(n_sig):
            up = -np.inf
            down = -np.inf
            big = -np.inf
            for i in range(N):
                s = 1.0 - 2.0 * ((code >> i) & 1)
                v = s * C[r, i]
                x = W[r, i] + lhs_scale * v
                if x > up:
                    up = x
                x = W[r, i] - lhs_scale * v
                if x > down:
                    down = x
                x = W[r, i] + rhs_scale * v
                if x > big:
                    big = x
            e = 0.5 * (up + down)
            if e > best:
                best = e
            acc += big
        lhs[r] = best
        rhs[r] = acc / n_sig
    return lhs, rhs
