import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multiscale.errors import ConfigurationError
from multiscale.harness.hedge import hedge_weights
from multiscale.subalgos import (
    Kernel,
    KernelOGD,
    LinearKernel,
    LinearPredictor,
    MatrixEG,
    MatrixMW,
    MirrorDescent,
    RBFKernel,
    capped_spectraplex_project,
    kernel_ogd_step,
    lp_norm,
    make_kernel,
    matrix_eg_step,
    md_regret_certificate,
    md_step,
    mmw_step,
)
from multiscale.subalgos.mirror import _lp_link

# ----------------------------------------------------------- mirror descent


def test_md_examples():
    md = MirrorDescent(3, 1.0, 10.0)
    md_step(md, np.zeros(3))
    assert md.w.tolist() == [0.0, 0.0, 0.0]
    md_step(md, [1.0, 0.0, 0.0])
    assert md.w.tolist() == [-1.0, 0.0, 0.0]
    md = MirrorDescent(3, 1.0, 1.0)
    md_step(md, [3.0, 0.0, 0.0])
    assert md.w.tolist() == [-1.0, 0.0, 0.0]


def test_md_rejects():
    with pytest.raises(ValueError):
        MirrorDescent(2, 1.0, 1.0).update([np.nan, 0.0])
    with pytest.raises(ConfigurationError):
        MirrorDescent(2, 1.0, 1.0, "lp", p=2.5)
    with pytest.raises(ConfigurationError):
        MirrorDescent(2, 1.0, 1.0, "huber")
    md = MirrorDescent(2, 1.0, 1.0, record=True)
    with pytest.raises(ConfigurationError):
        md_regret_certificate(md.trace, [2.0, 0.0], md)


def test_certificate_trivial_cases():
    for reg in ("l2", "lp", "entropy"):
        md = MirrorDescent(3, 0.5, 2.0, reg, p=1.5, record=True)
        u = md.project(np.array([0.5, 0.2, 0.1])) if reg != "entropy" else np.array([1.0, 0.5, 0.5])
        lhs, rhs = md_regret_certificate([], u, md)
        assert lhs == 0.0 and rhs == pytest.approx(md.regularizer_value(u) / md.eta)
        md.update(np.zeros(3))
        lhs, rhs = md_regret_certificate(md.trace, md.w, md)
        assert lhs == 0.0 <= rhs


def _comparator(md, rng):
    if md.regularizer == "entropy":
        return md.radius * rng.dirichlet(np.ones(md.dim))
    u = rng.standard_normal(md.dim)
    return u * (md.radius * rng.random() / md.norm(u))


@pytest.mark.parametrize("seed,reg,p", [(0, "l2", 2.0), (1, "lp", 1.5), (2, "lp", 1.2), (3, "entropy", 2.0)])
def test_fact1_certificate_random_streams(seed, reg, p):
    rng = np.random.default_rng(seed)
    for trial in range(100):
        d = int(rng.integers(1, 6))
        n = int(rng.integers(1, 120))
        md = MirrorDescent(d, rng.uniform(0.01, 2.0), rng.uniform(0.1, 5.0), reg, p=p, record=True)
        for _ in range(n):
            md.update(rng.uniform(-1, 1, d) * rng.uniform(0, 3))
        for _ in range(3):
            u = _comparator(md, rng)
            lhs, rhs = md_regret_certificate(md.trace, u, md)
            assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs)), (trial, lhs, rhs)


@pytest.mark.parametrize("reg,p", [("l2", 2.0), ("lp", 1.5), ("entropy", 2.0)])
def test_iterates_stay_in_set(reg, p):
    rng = np.random.default_rng(0)
    md = MirrorDescent(4, 0.7, 1.5, reg, p=p)
    for _ in range(200):
        md.update(rng.standard_normal(4) * 3)
        if reg == "entropy":
            assert md.w.sum() == pytest.approx(1.5, rel=1e-12) and np.all(md.w > 0)
        else:
            assert md.norm(md.w) <= 1.5 * (1 + 1e-12)


@given(st.integers(1, 5), st.sampled_from([1.25, 1.5, 2.0]), st.integers(0, 2**31 - 1))
def test_projection_idempotent(d, p, seed):
    rng = np.random.default_rng(seed)
    md = MirrorDescent(d, 1.0, 1.0, "lp", p=p)
    w = rng.standard_normal(d) * 5
    once = md.project(w)
    np.testing.assert_allclose(md.project(once), once, atol=1e-12)
    ent = MirrorDescent(d, 1.0, 2.0, "entropy")
    x = ent.project(rng.random(d) + 0.1)
    np.testing.assert_allclose(ent.project(x), x, atol=1e-12)


def _bregman(W, v, p):
    """D_R(w, v) for R = 0.5 ||.||_p^2, for every row w of W."""
    W = np.atleast_2d(W)
    return 0.5 * np.linalg.norm(W, p, axis=1) ** 2 - 0.5 * lp_norm(v, p) ** 2 - (W - v) @ _lp_link(v, p)


def _ball_grid(d, p, step):
    axis = np.arange(-1.0, 1.0 + 1e-9, step)
    for head in itertools.product(axis, repeat=d - 1):  # one slab at a time
        G = np.column_stack([np.tile(head, (axis.size, 1)), axis]) if d > 1 else axis[:, None]
        yield G[np.linalg.norm(G, p, axis=1) <= 1.0]


@pytest.mark.parametrize("p", [1.5, 2.0])
@pytest.mark.parametrize("d,step", [(1, 0.01), (2, 0.01), (3, 0.01), (4, 0.04)])
def test_radial_projection_is_bregman_optimal(p, d, step):
    rng = np.random.default_rng(int(p * 10) + d)
    md = MirrorDescent(d, 1.0, 1.0, "lp", p=p)
    vs = []
    for _ in range(3):
        v = rng.standard_normal(d)
        vs.append(v * rng.uniform(1.2, 3.0) / lp_norm(v, p))
    best = np.full(len(vs), np.inf)
    for G in _ball_grid(d, p, step):
        if G.size:
            for k, v in enumerate(vs):
                best[k] = min(best[k], float(_bregman(G, v, p).min()))
    for k, v in enumerate(vs):
        assert float(_bregman(md.project(v), v, p)[0]) <= best[k] + 1e-6


def test_linear_predictor():
    lp = LinearPredictor(MirrorDescent(2, 0.5, 1.0))
    assert lp.predict([1.0, 0.0]) == 0.0
    lp.update([1.0, 0.0], 1.0)
    assert lp.predict([1.0, 0.0]) == -0.5


# ----------------------------------------------------------- matrix learners


def _entropy_to(x, lam):
    x = np.asarray(x)
    pos = x > 0
    return float(np.sum(x[pos] * np.log(x[pos] / lam[pos])) - x.sum() + lam.sum())


def test_capped_projection_examples():
    x = np.array([0.5, 0.3, 0.2])
    np.testing.assert_allclose(capped_spectraplex_project(x, 1), x, atol=1e-15)
    assert capped_spectraplex_project([0.9, 0.1], 2).tolist() == [1.0, 1.0]
    lam = np.array([4.0, 1.0, 1.0]) / 6.0
    out = capped_spectraplex_project(lam, 1)
    # grid oracle over the feasible slice {x in [0,1]^3, sum x = 1}
    best, arg = np.inf, None
    h = 1e-3
    for i in range(1001):
        x0 = i * h
        x1 = np.arange(0, 1001 - i) * h
        X = np.stack([np.full(x1.size, x0), x1, 1.0 - x0 - x1], axis=1)
        X = X[X[:, 2] >= -1e-12].clip(0.0)
        vals = np.where(X > 0, X * np.log(np.where(X > 0, X, 1.0) / lam), 0.0).sum(1) - 1 + lam.sum()
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, arg = vals[k], X[k]
    assert np.abs(out - arg).max() <= 2e-3
    assert _entropy_to(out, lam) <= best + 1e-9


def test_capped_projection_caps():
    out = capped_spectraplex_project([0.2, 0.3, 5.0, 0.1], 2)
    assert out.sum() == pytest.approx(2.0)
    assert out[2] == 1.0 and np.all(out <= 1.0)
    with pytest.raises(ConfigurationError):
        capped_spectraplex_project([1.0, 1.0], 3)
    with pytest.raises(ConfigurationError):
        capped_spectraplex_project([1.0, -1.0], 1)


@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_capped_projection_properties(d, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, d + 1))
    lam = rng.exponential(size=d) + 1e-6
    out = capped_spectraplex_project(lam, k)
    assert out.sum() == pytest.approx(k, abs=1e-9)
    assert np.all(out >= 0) and np.all(out <= 1 + 1e-12)
    order = np.argsort(lam)
    assert np.all(np.diff(out[order]) >= -1e-12)  # order preserved
    np.testing.assert_allclose(capped_spectraplex_project(out, k), out, atol=1e-12)


def _check_matrix_state(W, lo, hi, trace=None, trace_max=None):
    assert np.abs(W - W.T).max() <= 1e-10
    ev = np.linalg.eigvalsh(W)
    assert ev.min() >= lo - 1e-8 and ev.max() <= hi + 1e-8
    if trace is not None:
        assert np.trace(W) == pytest.approx(trace, abs=1e-8)
    if trace_max is not None:
        assert np.abs(ev).sum() <= trace_max + 1e-8


def test_meg_planted_spike():
    d, n = 2, 500
    m = MatrixEG(d, 1, math.sqrt(math.log(d) / n))
    e1 = np.diag([1.0, 0.0])
    for _ in range(n):
        matrix_eg_step(m, e1)
        _check_matrix_state(m.W, 0.0, 1.0, trace=1.0)
    v = np.linalg.eigh(m.W)[1][:, -1]
    assert abs(v[0]) >= 0.99
    assert m.W[0, 0] >= 0.99


def test_meg_invariants_random():
    rng = np.random.default_rng(0)
    d, k = 6, 3
    m = MatrixEG(d, k, 0.3)
    for _ in range(100):
        x = rng.standard_normal(d)
        x /= np.linalg.norm(x)
        matrix_eg_step(m, np.outer(x, x))
        _check_matrix_state(m.W, 0.0, 1.0, trace=k)


def test_meg_zero_and_commuting():
    m = MatrixEG(4, 2, 0.5)
    W0 = m.W.copy()
    matrix_eg_step(m, np.zeros((4, 4)))
    assert np.array_equal(m.W, W0)
    matrix_eg_step(m, np.diag([1.0, 0.5, 0.0, 0.0]))
    off = m.W - np.diag(np.diag(m.W))
    assert np.abs(off).max() <= 1e-12  # diagonal update keeps the eigenbasis


def test_meg_rejects():
    with pytest.raises(ConfigurationError):
        MatrixEG(4, 3, 0.1)  # k > d / 2
    m = MatrixEG(2, 1, 0.1)
    with pytest.raises(ConfigurationError):
        matrix_eg_step(m, np.array([[1.0, 0.5], [0.0, 0.0]]))
    with pytest.raises(ConfigurationError):
        matrix_eg_step(m, np.diag([2.0, 0.0]))
    with pytest.raises(ConfigurationError):
        matrix_eg_step(m, np.diag([-0.5, 0.0]))


def test_mmw_zero_stream_and_invariants():
    m = MatrixMW(3, 2.0, 0.2)
    W0 = m.W.copy()
    np.testing.assert_allclose(W0, np.eye(3) * 0.5)
    mmw_step(m, np.zeros((3, 3)))
    assert np.array_equal(m.W, W0)
    rng = np.random.default_rng(1)
    for _ in range(100):
        A = rng.standard_normal((3, 3))
        Y = A + A.T
        Y /= np.abs(np.linalg.eigvalsh(Y)).max()
        mmw_step(m, Y)
        _check_matrix_state(m.W, 0.0, 2.0, trace_max=2.0)
    with pytest.raises(ConfigurationError):
        mmw_step(m, np.eye(3) * 1.5)


def test_mmw_scalar_is_two_expert_hedge():
    eta = 0.15
    m = MatrixMW(1, 1.0, eta)
    rng = np.random.default_rng(2)
    cum = np.zeros(2)
    for _ in range(300):
        w_hedge = hedge_weights(cum, eta)
        assert abs(m.W[0, 0] - w_hedge[0]) <= 1e-12
        y = rng.uniform(-1, 1)
        mmw_step(m, [[y]])
        cum += [y, 0.0]


def test_mmw_alternating_regret_shape():
    d, n, r = 4, 1000, 1.0
    m = MatrixMW(d, r, math.sqrt(math.log(d + 1) / n))
    e1 = np.zeros((d, d))
    e1[0, 0] = 1.0
    total = 0.0
    for t in range(n):
        Y = e1 if t % 2 == 0 else -e1
        total += float(np.vdot(m.W, Y))
        mmw_step(m, Y)
    assert abs(total) <= 3 * r * math.sqrt(n * math.log(d))


# ----------------------------------------------------------- kernel learner


def test_kernel_ogd_zero_gradient():
    k = KernelOGD(RBFKernel(1.0), 1.0, 0.5)
    kernel_ogd_step(k, np.ones(2), 0.0)
    assert k.m == 0 and k.predict(np.ones(2)) == 0.0


def test_kernel_linear_matches_md():
    rng = np.random.default_rng(0)
    k = KernelOGD(LinearKernel(), 2.0, 0.3)
    md = MirrorDescent(3, 0.3, 2.0)
    for _ in range(400):
        x = rng.standard_normal(3)
        x /= max(1.0, np.linalg.norm(x))
        g = rng.uniform(-1, 1)
        assert abs(k.predict(x) - float(x @ md.w)) <= 1e-9
        kernel_ogd_step(k, x, g)
        md_step(md, g * x)
    assert k.rkhs_norm() == pytest.approx(k.rkhs_norm(exact=True), rel=1e-9)


def test_kernel_boundary_projection():
    k = KernelOGD(RBFKernel(2.0), 1.0, 1.0)
    kernel_ogd_step(k, np.array([0.1, 0.2]), 50.0)
    assert k.rkhs_norm(exact=True) == pytest.approx(1.0, rel=1e-12)


class _NegKernel(Kernel):
    name = "negative"

    def __call__(self, X, y):
        return -(X @ y)


def test_kernel_non_pd_detected():
    k = KernelOGD(_NegKernel(), 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        kernel_ogd_step(k, np.ones(2), 1.0)


def test_make_kernel():
    assert make_kernel("rbf", gamma=0.5).params() == {"gamma": 0.5}
    assert make_kernel("poly", degree=3).bound == pytest.approx(2 ** 1.5)
    with pytest.raises(ConfigurationError):
        make_kernel("sigmoid")
