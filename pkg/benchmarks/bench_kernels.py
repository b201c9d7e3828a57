"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Numba compile time is paid once in a warm-up call and excluded from the table.
"""

import argparse
import time

import numpy as np

from multiscale import kernels


def _time(fn, repeat):
    fn()  # warm-up (jit compile for numba)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(rng):
    N = 25
    c = 2.0 ** rng.integers(0, 8, N).astype(float)
    A = rng.uniform(-100, 100, (2000, N))

    def primal(be):
        return lambda: [be.saddle_primal(c, a) for a in A]

    def dual(be):
        return lambda: [be.saddle_dual(c, a) for a in A]

    n = 2000
    B = rng.uniform(10, 100, N)
    losses = rng.choice([-1.0, 1.0], (n, N)) * c
    tails = rng.standard_normal((n, N)) * np.sqrt(np.arange(n, 0, -1) - 1.0)[:, None]
    u = rng.random(n)

    def game(be):
        return lambda: be.play_expert_game(c, B, losses, tails, u)

    W = rng.uniform(-5, 5, (5000, 4))
    C = rng.uniform(0, 3, (5000, 4))

    def lemma(be):
        return lambda: be.lemma_sides(W, C, 2.0, 4.0)

    return [
        ("saddle_primal  2000 x N=25", primal),
        ("saddle_dual    2000 x N=25", dual),
        ("expert game    n=2000 N=25", game),
        ("lemma_sides    5000 x N=4", lemma),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    nb = kernels.numba_backend()
    npk = kernels.numpy_backend
    rng = np.random.default_rng(0)
    print(f"{'kernel':<30}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, make in cases(rng):
        t_np = _time(make(npk), args.repeat)
        t_nb = _time(make(nb), args.repeat)
        print(f"{name:<30}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
