"""Online gradient descent on an RKHS norm ball, in dual (support vector) form."""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigurationError

PD_TOL = 1e-8


class Kernel:
    """Positive-definite kernel. ``bound`` is sup_x sqrt(K(x, x)) on the unit l2 ball."""

    name = "kernel"
    bound = 1.0

    def __call__(self, X, y):
        """K(x_j, y) for every row x_j of X."""
        raise NotImplementedError

    def diag(self, x):
        return float(self(np.asarray(x, dtype=np.float64)[None, :], x)[0])

    def params(self):
        return {}


class LinearKernel(Kernel):
    name = "linear"

    def __call__(self, X, y):
        return X @ y


class RBFKernel(Kernel):
    name = "rbf"

    def __init__(self, gamma=1.0):
        if gamma <= 0:
            raise ConfigurationError("rbf bandwidth must be positive")
        self.gamma = float(gamma)

    def params(self):
        return {"gamma": self.gamma}

    def __call__(self, X, y):
        return np.exp(-self.gamma * np.sum((X - y) ** 2, axis=1))


class PolynomialKernel(Kernel):
    """(offset + <x, y>)^degree."""

    name = "poly"

    def __init__(self, degree=2, offset=1.0):
        if degree < 1 or offset < 0:
            raise ConfigurationError("polynomial kernel needs degree >= 1 and offset >= 0")
        self.degree = int(degree)
        self.offset = float(offset)
        self.bound = (self.offset + 1.0) ** (self.degree / 2.0)

    def params(self):
        return {"degree": self.degree, "offset": self.offset}

    def __call__(self, X, y):
        return (self.offset + X @ y) ** self.degree


KERNELS = {"linear": LinearKernel, "rbf": RBFKernel, "poly": PolynomialKernel}


def make_kernel(name, **params) -> Kernel:
    try:
        cls = KERNELS[name]
    except KeyError:
        raise ConfigurationError(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None
    return cls(**params)


class KernelOGD:
    """Kernelized online gradient descent with radial projection to ``radius``.

    f(x) = sum_j alpha_j K(x_j, x). The squared RKHS norm alpha^T K alpha is
    tracked incrementally. Positive definiteness is checked on the full Gram
    matrix while the support is small (sizes 1, 2, 4, ..., PD_BLOCK) and on the
    trailing PD_BLOCK x PD_BLOCK principal block every PD_BLOCK steps after that.
    """

    PD_BLOCK = 256

    def __init__(self, kernel: Kernel, radius, eta, dim=None):
        if radius <= 0 or eta <= 0:
            raise ConfigurationError("radius and eta must be positive")
        self.kernel = kernel
        self.radius = float(radius)
        self.eta = float(eta)
        self.dim = dim
        self.m = 0
        self._X = None
        self._alpha = np.zeros(0)
        self._sq = 0.0
        self._cache = None  # (x bytes, kernel column) of the last query

    @property
    def support(self):
        return self._X[: self.m] if self.m else np.zeros((0, self.dim or 0))

    @property
    def alpha(self):
        return self._alpha[: self.m]

    def _column(self, x):
        key = x.tobytes()
        if self._cache is not None and self._cache[0] == key:
            return self._cache[1]
        col = self.kernel(self._X[: self.m], x) if self.m else np.zeros(0)
        self._cache = (key, col)
        return col

    def predict(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if not self.m:
            return 0.0
        return float(self._column(x) @ self.alpha)

    def gram(self, start=0):
        X = self._X[start : self.m]
        return np.array([self.kernel(X, x) for x in X]).reshape(len(X), len(X))

    def rkhs_norm(self, exact=False):
        if exact and self.m:
            a = self.alpha
            q = float(a @ self.gram() @ a)
        else:
            q = self._sq
        return math.sqrt(max(q, 0.0))

    def _check_pd(self):
        m, blk = self.m, self.PD_BLOCK
        if m <= blk and m & (m - 1) == 0:
            G = self.gram()
        elif m > blk and m % blk == 0:
            G = self.gram(m - blk)
        else:
            return
        lo = float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])
        if lo < -PD_TOL:
            raise ConfigurationError(
                f"kernel {self.kernel.name!r} is not positive definite: Gram eigenvalue {lo!r}"
            )

    def _grow(self, d):
        if self._X is None:
            self._X = np.empty((16, d))
            self._alpha = np.zeros(16)
        elif self.m == len(self._alpha):
            self._X = np.vstack([self._X, np.empty_like(self._X)])
            self._alpha = np.concatenate([self._alpha, np.zeros_like(self._alpha)])

    def update(self, x, grad):
        grad = float(grad)
        if not math.isfinite(grad):
            raise ValueError("gradient must be finite")
        if grad == 0.0:
            return self
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        fx = float(self._column(x) @ self.alpha) if self.m else 0.0
        kxx = self.kernel.diag(x)
        a = -self.eta * grad
        self._grow(x.size)
        self._X[self.m] = x
        self._alpha[self.m] = a
        self.m += 1
        self._sq = self._sq + 2.0 * a * fx + a * a * kxx
        self._cache = None
        self._check_pd()
        nrm = self.rkhs_norm()
        if nrm > self.radius:
            scale = self.radius / nrm
            self._alpha[: self.m] *= scale
            self._sq = self.radius**2
        return self


def kernel_ogd_step(state: KernelOGD, x, loss_grad_at_prediction) -> KernelOGD:
    return state.update(x, loss_grad_at_prediction)
