"""Multi-scale follow-the-perturbed-leader over N experts with ranges c_i.

Each round draws a fresh perturbation of the remaining horizon, solves the
per-round min-max problem and samples an expert from the resulting
distribution. The comparator penalty for expert i is

    B(i) = 5 c_i sqrt(n log(4 c_i^2 n / pi_i)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import CompensatedSum, LossVector, ScaleProfile, SimplexWeights
from .errors import ConfigurationError, SizingError, SolverError
from .saddle import build_saddle_coefficients, default_epsilon, solve

GAUSSIAN = "gaussian-tail"
RADEMACHER = "rademacher-exact"
MODES = (GAUSSIAN, RADEMACHER)


def compute_bound(c_i, n, pi_i):
    """Comparator penalty 5 c sqrt(n ln(4 c^2 n / pi))."""
    if c_i < 1 or n < 1 or not 0 < pi_i <= 1:
        raise ConfigurationError(f"need c >= 1, n >= 1, 0 < pi <= 1; got {c_i}, {n}, {pi_i}")
    arg = 4.0 * c_i * c_i * n / pi_i
    if not math.isfinite(arg):
        raise SizingError(f"4 c^2 n / pi overflows for c={c_i!r}, n={n}, pi={pi_i!r}")
    out = 5.0 * c_i * math.sqrt(n * math.log(arg))
    if not math.isfinite(out):
        raise SizingError(f"bound overflows for c={c_i!r}, n={n}")
    return out


def bound_vector(profile: ScaleProfile, n):
    return np.array([compute_bound(c, n, p) for c, p in zip(profile.c, profile.pi)])


@dataclass(frozen=True)
class TailPerturbation:
    """Perturbation of the rounds after t: a sum of signs or its Gaussian stand-in."""

    z: np.ndarray
    mode: str


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


class FtplState:
    """Game state for one run of the multi-scale perturbed leader.

    Randomness is pre-drawn per round from independent child streams (one per
    perturbation mode, one for expert sampling), so row t of each block belongs
    to round t no matter which mode or solver is used.
    """

    def __init__(self, profile: ScaleProfile, n: int, *, mode=GAUSSIAN, seed=0, epsilon=None):
        if mode not in MODES:
            raise ConfigurationError(f"unknown perturbation mode {mode!r}; use one of {MODES}")
        if n < 1:
            raise ConfigurationError("horizon must be >= 1")
        self.profile = profile
        self.n = int(n)
        self.mode = mode
        self.B = bound_vector(profile, self.n)
        self.B.setflags(write=False)
        self.epsilon = default_epsilon(self.n, profile.c) if epsilon is None else float(epsilon)
        self.t = 1
        self._G = CompensatedSum((profile.n_experts,))
        self._seq = _seed_sequence(seed)
        self._tails = None
        self._uniforms = None
        self._pending = None
        self.history = []

    @property
    def N(self):
        return self.profile.n_experts

    @property
    def G(self):
        return self._G.value

    # -- randomness

    def _blocks(self):
        if self._tails is None:
            gauss_seq, rad_seq, draw_seq = self._seq.spawn(3)
            remaining = (self.n - np.arange(1, self.n + 1)).astype(np.float64)
            shape = (self.n, self.N)
            if self.mode == GAUSSIAN:
                z = np.random.default_rng(gauss_seq).standard_normal(shape)
                self._tails = z * np.sqrt(remaining)[:, None]
            else:
                m = remaining.astype(np.int64)[:, None]
                heads = np.random.default_rng(rad_seq).binomial(m, 0.5, size=shape)
                self._tails = (2 * heads - m).astype(np.float64)
            self._uniforms = np.random.default_rng(draw_seq).random(self.n)
        return self._tails, self._uniforms

    def draw_tail(self) -> TailPerturbation:
        if not 1 <= self.t <= self.n:
            raise ConfigurationError(f"round {self.t} outside 1..{self.n}")
        tails, _ = self._blocks()
        z = tails[self.t - 1].copy()
        z.setflags(write=False)
        return TailPerturbation(z=z, mode=self.mode)

    # -- play

    def step(self):
        """Distribution and sampled expert for the current round."""
        if self._pending is not None:
            raise RuntimeError(f"round {self.t} already stepped; call observe first")
        tail = self.draw_tail()
        problem = build_saddle_coefficients(self.G, tail.z, self.profile, self.B)
        try:
            sol = solve(problem, self.epsilon)
        except SolverError as exc:
            raise SolverError(f"round {self.t} of {self.n}: {exc}", p=exc.p, gap=exc.gap) from exc
        _, uniforms = self._blocks()
        chosen = int(kernels.sample_index(sol.p.p, uniforms[self.t - 1]))
        self._pending = (sol.p, chosen)
        self.history.append((sol.p.p, chosen))
        return sol.p, chosen

    def observe(self, g):
        """Ingest the round's loss vector and advance to the next round."""
        if not isinstance(g, LossVector):
            g = LossVector(g, self.profile)
        self._G.add(g.g)
        self.t += 1
        self._pending = None
        return self

    def play(self, losses):
        """Run every remaining round against a fixed (n, N) loss matrix.

        Uses the compiled game loop; results match stepping round by round.
        Returns ``(chosen, probs)``.
        """
        losses = np.asarray(losses, dtype=np.float64)
        if self.t != 1:
            raise RuntimeError("play() runs a full game from round 1")
        if losses.shape != (self.n, self.N):
            raise ConfigurationError(f"loss matrix must be {(self.n, self.N)}, got {losses.shape}")
        bad = np.argwhere(~(np.abs(losses) <= self.profile.c * (1 + 1e-12)))
        if bad.size:
            t, i = bad[0]
            LossVector(losses[t], self.profile)  # raises with the offending index
        tails, uniforms = self._blocks()
        chosen, probs = kernels.play_expert_game(
            np.ascontiguousarray(self.profile.c), np.ascontiguousarray(self.B), losses, tails, uniforms
        )
        for row in losses:
            self._G.add(row)
        self.t = self.n + 1
        self.history.extend(zip(probs, chosen.tolist()))
        return chosen, probs


def draw_tail_perturbation(state: FtplState) -> TailPerturbation:
    return state.draw_tail()


def step(state: FtplState):
    return state.step()


def observe(state: FtplState, g) -> FtplState:
    return state.observe(g)


def relaxation_samples(G, profile: ScaleProfile, B, remaining, samples, rng):
    """Draws of sup_i [-G_i + 4 z_i c_i - B_i] with z a sum of ``remaining`` signs."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    G = np.asarray(G, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    base = -G - B
    if remaining == 0:
        return np.full(samples, base.max())
    heads = rng.binomial(remaining, 0.5, size=(samples, profile.n_experts))
    z = 2.0 * heads - remaining
    return (base + 4.0 * z * profile.c).max(axis=1)


def relaxation_estimate(G, profile: ScaleProfile, B, remaining, samples, rng) -> float:
    """Monte Carlo value of the relaxation after the rounds summarized by G."""
    if remaining == 0:
        return float(np.max(-np.asarray(G, float) - np.asarray(B, float)))
    return float(relaxation_samples(G, profile, B, remaining, samples, rng).mean())
