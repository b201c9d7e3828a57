"""Matrix learners: exponentiated gradient on the capped spectraplex (online PCA)
and matrix multiplicative weights on a trace-norm ball."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, DimensionError

SYM_TOL = 1e-10
SPEC_TOL = 1e-12
EXP_FLOOR = -700.0  # keep exp() away from exact underflow


def symmetrize(A, tol=SYM_TOL):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix must be finite")
    if np.max(np.abs(A - A.T), initial=0.0) > tol * max(1.0, np.max(np.abs(A), initial=0.0)):
        raise ConfigurationError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def _check_loss_matrix(Y, d, psd):
    Y = symmetrize(Y)
    if Y.shape != (d, d):
        raise DimensionError(f"loss matrix must be {d}x{d}, got {Y.shape}")
    ev = np.linalg.eigvalsh(Y)
    if np.max(np.abs(ev), initial=0.0) > 1.0 + SPEC_TOL:
        raise ConfigurationError(f"spectral norm {np.max(np.abs(ev))!r} exceeds 1")
    if psd and ev[0] < -1e-10:
        raise ConfigurationError("loss matrix must be positive semidefinite")
    return Y


def _exp_weights(S, eta, sign):
    """Eigenvectors of S and exp(sign * eta * eigs) rescaled so the largest is 1."""
    mu, V = np.linalg.eigh(S)
    z = sign * eta * mu
    z = np.maximum(z - z.max(), EXP_FLOOR)
    return np.exp(z), V


def capped_spectraplex_project(eigs, k):
    """Relative-entropy projection of a positive spectrum onto {0 <= x <= 1, sum x = k}.

    The minimizer has the form x_i = min(1, theta * eigs_i); theta is found by
    capping the largest entries one at a time.
    """
    lam = np.asarray(eigs, dtype=np.float64).reshape(-1)
    d = lam.size
    if not 0 < k <= d:
        raise ConfigurationError(f"need 0 < k <= d, got k={k}, d={d}")
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise ConfigurationError("eigenvalues must be finite and positive")
    if k == d:
        return np.ones(d)
    order = np.argsort(-lam, kind="stable")
    srt = lam[order]
    tail = np.cumsum(srt[::-1])[::-1]  # tail[m] = sum of srt[m:]
    out_sorted = None
    for m in range(int(k)):  # m entries capped at 1; at most k - 1 can be
        theta = (k - m) / tail[m]
        if theta * srt[m] <= 1.0 + 1e-12 and (m == 0 or theta * srt[m - 1] >= 1.0 - 1e-12):
            out_sorted = np.minimum(1.0, theta * srt)
            out_sorted[:m] = 1.0
            break
    if out_sorted is None:  # only from rounding at the boundary
        raise ConfigurationError("capping projection failed to find a threshold")
    out = np.empty(d)
    out[order] = out_sorted
    return out


class MatrixEG:
    """Online PCA by lazy matrix exponentiated gradient.

    W_t = V diag(capped(exp(eta * eig(S_t)))) V^T with S_t the sum of the loss
    matrices so far, so that 0 <= W <= I and tr W = k.
    """

    def __init__(self, d, k, eta):
        if not 1 <= k <= d // 2:
            raise ConfigurationError(f"online PCA supports 1 <= k <= d/2, got k={k}, d={d}")
        if eta <= 0:
            raise ConfigurationError("eta must be positive")
        self.d, self.k, self.eta = int(d), int(k), float(eta)
        self.S = np.zeros((self.d, self.d))
        self.W = np.eye(self.d) * (self.k / self.d)

    def predict(self):
        return self.W.copy()

    def _refresh(self):
        w, V = _exp_weights(self.S, self.eta, +1.0)
        lam = capped_spectraplex_project(w, self.k)
        W = (V * lam) @ V.T
        self.W = 0.5 * (W + W.T)

    def update(self, grad):
        """Feed the gradient of the round's loss (for <I - W, Y> this is -Y)."""
        grad = symmetrize(grad)
        if not np.any(grad):
            return self
        self.S -= grad
        self._refresh()
        return self


def matrix_eg_step(state: MatrixEG, Y) -> MatrixEG:
    """One online PCA round with loss <I - W, Y>."""
    Y = _check_loss_matrix(Y, state.d, psd=True)
    return state.update(-Y)


class MatrixMW:
    """Matrix multiplicative weights on {W >= 0, ||W||_trace <= r}.

    Runs on the (d+1)-dimensional spectraplex scaled by r; the extra coordinate
    receives zero loss and absorbs the unused trace budget.
    """

    def __init__(self, d, r, eta):
        if r <= 0 or eta <= 0:
            raise ConfigurationError("radius and eta must be positive")
        self.d, self.r, self.eta = int(d), float(r), float(eta)
        self.S = np.zeros((self.d + 1, self.d + 1))
        self.W = np.eye(self.d) * (self.r / (self.d + 1))

    def predict(self):
        return self.W.copy()

    def update(self, grad):
        grad = symmetrize(grad)
        if grad.shape != (self.d, self.d):
            raise DimensionError(f"gradient must be {self.d}x{self.d}")
        if not np.any(grad):
            return self
        self.S[: self.d, : self.d] += grad
        w, V = _exp_weights(self.S, self.eta, -1.0)
        Wbar = (V * (self.r * w / w.sum())) @ V.T
        W = Wbar[: self.d, : self.d]
        self.W = 0.5 * (W + W.T)
        return self


def mmw_step(state: MatrixMW, Y) -> MatrixMW:
    """One round with linear loss <W, Y>, ||Y||_spectral <= 1."""
    Y = _check_loss_matrix(Y, state.d, psd=False)
    return state.update(Y)
