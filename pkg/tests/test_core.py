import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multiscale.core import (
    AbsoluteDeviationLoss,
    AbsoluteLoss,
    CompensatedSum,
    LinearLoss,
    LogisticLoss,
    LossVector,
    MatrixLinearLoss,
    RegretLedger,
    ScaleLiftWarning,
    ScaleProfile,
    SimplexWeights,
    center_loss,
    cumulative_regret,
    lift_scales,
    pca_loss,
)
from multiscale.errors import ConfigurationError, DimensionError, ScaleViolation


def test_scale_profile_validation():
    p = ScaleProfile([1.0, 2.0], [0.5, 0.5])
    assert p.n_experts == 2
    with pytest.raises(ConfigurationError):
        ScaleProfile([0.5, 2.0], [0.5, 0.5])
    with pytest.raises(ConfigurationError):
        ScaleProfile([1.0, 2.0], [1.0, 0.0])
    with pytest.raises(ConfigurationError):
        ScaleProfile([1.0, 2.0], [0.5, 0.6])
    with pytest.raises(DimensionError):
        ScaleProfile([1.0, 2.0], [1.0])
    with pytest.raises(ConfigurationError):
        ScaleProfile([], [])
    with pytest.raises(ValueError):
        p.c[0] = 3.0  # read-only


def test_lift_scales_warns():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        out = lift_scales([0.3, 2.0])
    assert out.tolist() == [1.0, 2.0]
    assert rec and issubclass(rec[0].category, ScaleLiftWarning)


@given(
    st.lists(st.floats(1.0, 100.0), min_size=1, max_size=8),
    st.floats(-3.0, 3.0),
    st.integers(0, 7),
)
def test_loss_vector_range_check(c, factor, idx):
    c = np.array(c)
    profile = ScaleProfile.uniform(c)
    i = idx % c.size
    g = np.zeros(c.size)
    g[i] = factor * c[i]
    if abs(factor) * c[i] > c[i] * (1 + 1e-12):
        with pytest.raises(ScaleViolation) as exc:
            LossVector(g, profile)
        assert exc.value.index == i
    else:
        assert LossVector(g, profile).g[i] == g[i]


def test_loss_vector_tolerance_edge():
    prof = ScaleProfile.uniform([1.0])
    LossVector([1.0 + 1e-13], prof)
    with pytest.raises(ScaleViolation):
        LossVector([1.0 + 1e-11], prof)


def test_simplex_weights():
    SimplexWeights([0.25, 0.75])
    with pytest.raises(ConfigurationError):
        SimplexWeights([0.5, 0.6])
    with pytest.raises(ConfigurationError):
        SimplexWeights([1.5, -0.5])


def test_center_loss_examples():
    g = np.array([1.0, -2.0])
    f = LinearLoss(g)
    ft = center_loss(f)
    w = np.array([0.3, 0.7])
    assert ft(w) == f(w)
    f7 = LinearLoss(g, offset=7.0)
    assert center_loss(f7)(w) == pytest.approx(float(g @ w), abs=1e-15)
    h = AbsoluteDeviationLoss([1.0], 1.0)
    ht = center_loss(h)
    assert ht(np.zeros(1)) == 0.0
    assert ht(np.array([2.0])) == 0.0


class _Broken(LinearLoss):
    def evaluate(self, w):
        if not np.any(w):
            raise ZeroDivisionError("undefined at 0")
        return super().evaluate(w)


def test_center_loss_rejects_bad_origin():
    with pytest.raises(ConfigurationError):
        center_loss(_Broken([1.0]))

    class Inf(LinearLoss):
        def evaluate(self, w):
            return math.inf

    with pytest.raises(ConfigurationError):
        center_loss(Inf([1.0]))


def _builtin_losses(rng):
    d = 4
    Y = rng.standard_normal((d, d))
    Y = Y + Y.T
    return [
        LinearLoss(rng.standard_normal(d), offset=3.0),
        AbsoluteDeviationLoss(rng.standard_normal(d), 0.7),
        MatrixLinearLoss(Y, offset=-1.0),
        pca_loss(Y @ Y.T / 10),
    ]


def test_center_loss_idempotent():
    rng = np.random.default_rng(0)
    for f in _builtin_losses(rng):
        once, twice = center_loss(f), center_loss(center_loss(f))
        for _ in range(50):
            w = rng.standard_normal(f.shape)
            assert twice(w) == pytest.approx(once(w), abs=1e-12)


def test_subgradient_finite_differences():
    rng = np.random.default_rng(1)
    for f in _builtin_losses(rng):
        for _ in range(10):
            w = rng.standard_normal(f.shape)
            v = rng.standard_normal(f.shape)
            h = 1e-6
            fd = (f(w + h * v) - f(w - h * v)) / (2 * h)
            an = float(np.vdot(f.subgradient(w), v))
            assert fd == pytest.approx(an, rel=1e-4, abs=1e-6)


def test_prediction_losses():
    ab = AbsoluteLoss()
    assert ab(1.0, 0.0) == 1.0 and ab.centered(1.0, 0.0) == 1.0
    assert ab.centered(0.0, 0.3) == 0.0
    lg = LogisticLoss()
    for yhat in (-2.0, 0.1, 3.0):
        for y in (-1.0, 1.0):
            h = 1e-6
            fd = (lg(yhat + h, y) - lg(yhat - h, y)) / (2 * h)
            assert fd == pytest.approx(lg.derivative(yhat, y), rel=1e-6)
            assert abs(lg.derivative(yhat, y)) <= 1.0


def test_lipschitz_constants():
    g = np.array([3.0, -4.0])
    f = LinearLoss(g)
    assert f.lipschitz(2.0) == pytest.approx(5.0)
    assert f.lipschitz(1.0) == pytest.approx(4.0)
    assert f.lipschitz(math.inf) == pytest.approx(7.0)
    assert MatrixLinearLoss(np.diag([0.5, -2.0])).lipschitz() == pytest.approx(2.0)


def test_cumulative_regret_examples():
    led = RegretLedger()
    for t in range(3):
        led.record(t + 1, 0, 1.0)
    assert cumulative_regret(led, 3.0) == 0.0
    led = RegretLedger()
    led.record(1, 0, 0.0)
    led.record(2, 0, 0.0)
    assert cumulative_regret(led, -2.0) == 2.0
    led = RegretLedger()
    for t in range(100):
        led.record(t + 1, 0, 0.5)
    assert cumulative_regret(led, 40.0) == 10.0
    with pytest.raises(ValueError):
        cumulative_regret(RegretLedger(), 0.0)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60), st.randoms())
def test_ledger_total_permutation_invariant(vals, rnd):
    a, b = RegretLedger(), RegretLedger()
    perm = list(vals)
    rnd.shuffle(perm)
    for t, v in enumerate(vals):
        a.record(t + 1, 0, v, [v, -v])
    for t, v in enumerate(perm):
        b.record(t + 1, 0, v, [v, -v])
    assert a.total_loss == b.total_loss == math.fsum(vals)
    assert np.array_equal(a.sub_losses, b.sub_losses)


def test_ledger_exact_with_cancellation():
    led = RegretLedger()
    for v in [1e16, 1.0, -1e16] * 1000:
        led.record(0, 0, v)
    assert led.total_loss == 1000.0


def test_compensated_sum():
    cs = CompensatedSum((2,))
    for _ in range(10**4):
        cs.add([0.1, -0.1])
    assert cs.value[0] == pytest.approx(1000.0, abs=1e-12)
    assert cs.value[1] == pytest.approx(-1000.0, abs=1e-12)
