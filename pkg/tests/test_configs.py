import math

import numpy as np
import pytest

from multiscale.configs import (
    banach_nested_config,
    comparator_range,
    lp_exponents,
    lp_grid_config,
    mkl_config,
    mmw_config,
    pca_budgets,
    pca_config,
)
from multiscale.core import LinearLoss
from multiscale.errors import ConfigurationError
from multiscale.harness.streams import (
    gen_linear_stream,
    gen_matrix_stream,
    gen_pca_stream,
    gen_supervised_stream,
)
from multiscale.meta import run_learning, run_oco
from multiscale.subalgos import LinearKernel


def test_banach_examples():
    s = banach_nested_config(1.0, 1.0, 3)
    np.testing.assert_allclose(s.radii, [1, math.e, math.e**2, math.e**3])
    np.testing.assert_allclose(s.prior, [0.25] * 4)
    etas = [h.params["eta"] for h in s.handles]
    np.testing.assert_allclose(etas, s.radii * math.sqrt(1 / 3))
    s = banach_nested_config(1.0, 1.0, 1000, max_experts=15)
    assert s.n_experts == 15
    assert s.radii[-1] == pytest.approx(math.e**14)
    np.testing.assert_allclose(s.prior, 1 / 15)


def test_lp_grid_examples():
    ps, eps = lp_exponents(0.5, math.e)
    assert eps == 1.0 and ps.tolist() == [1.5, 2.0]
    ps, eps = lp_exponents(1e-12, math.exp(10))
    assert eps == pytest.approx(0.1) and ps.size == 11
    for d in (2, 3, 10, 100, 1e6):
        for delta in (0.01, 0.25, 0.9):
            ps, _ = lp_exponents(delta, d)
            assert np.all(ps >= 1 + delta - 1e-15) and np.all(ps <= 2.0)
    with pytest.raises(ConfigurationError):
        lp_grid_config(1.0, 10, lambda p: 1.0, 10)
    with pytest.raises(ConfigurationError):
        lp_grid_config(0.0, 10, lambda p: 1.0, 10)


def test_lp_grid_structure():
    s = lp_grid_config(0.25, 10, {1.25: 1.0, 1.25 + 1 / math.log(10): 1.0, 2.0: 1.0}, 50, max_experts=4)
    ps, _ = lp_exponents(0.25, 10)
    assert s.n_experts == ps.size * 4
    np.testing.assert_allclose(s.prior, 1 / s.n_experts)
    h = s.handles[5]
    assert h.params["p"] == pytest.approx(ps[1])
    assert h.params["eta"] == pytest.approx(h.R / h.L * math.sqrt((ps[1] - 1) / 50))


@pytest.mark.parametrize("delta,d", [(0.25, 10), (0.1, 50), (0.5, 3), (0.05, 1000)])
def test_lp_discretization_property(delta, d):
    ps, eps = lp_exponents(delta, d)
    assert d**eps == pytest.approx(math.e, rel=1e-12)
    for p in np.linspace(1 + delta, 2.0, 500):
        below = ps[ps <= p + 1e-15]
        assert below.size and p - below.max() <= eps + 1e-12


def test_pca_examples():
    assert pca_budgets(2) == [1]
    assert pca_budgets(16) == [1, 3, 7, 8]
    s = pca_config(16, 100)
    assert s.n_experts == 4
    assert all(h.params["k"] <= 8 for h in s.handles)
    assert math.ceil(math.log(16 / 2)) + 1 == 4


def test_mmw_examples():
    s = mmw_config(3, 3)
    assert s.radii.tolist() == [1, 2, 4, 8]
    s = mmw_config(3, 100, max_experts=20)
    assert s.radii[-1] == 2.0**19


def test_mkl_prior_and_equivalence():
    s = mkl_config([(("linear", {}), 1.0), (("rbf", {"gamma": 1.0}), 1.0)], 10, max_experts=3)
    assert s.prior.sum() == pytest.approx(1.0)
    assert s.prior[0] / s.prior[3] == pytest.approx(4.0)
    # one linear kernel reproduces the nested l2 balls on a supervised stream
    n, d = 60, 3
    mk = mkl_config([(LinearKernel(), 1.0)], n, max_experts=4, dimension=d)
    bn = banach_nested_config(1.0, 1.0, n, max_experts=4, mode="supervised", dimension=d)
    ha, hb = mk.build_handles(), bn.build_handles()
    for x, y in gen_supervised_stream(d, n, target=[0.5, -0.2, 0.1], label_noise=0.1, seed=0):
        for a, b in zip(ha, hb):
            pa, pb = a.learner.predict(x), b.learner.predict(x)
            assert abs(pa - pb) <= 1e-9
            g = float(np.sign(pa - y))
            a.learner.update(x, g)
            b.learner.update(x, g)


def test_comparator_range_examples():
    n, L = 30, 1.0
    assert comparator_range(L, n, L * math.sqrt(n), 0.5) == pytest.approx(math.exp(n), rel=1e-12)
    assert comparator_range(2.0, 5, 10.0, 1.0) == pytest.approx(math.e)
    for g in (0.3, 1.0, 7.0):
        assert comparator_range(3.0, 4, 12.0, g) == pytest.approx(math.e)
    assert comparator_range(1.0, 10**4, 1.0, 0.5) == math.inf
    with pytest.raises(ConfigurationError):
        comparator_range(1.0, 1, 0.0, 1.0)


def test_nested_grid_coverage():
    s = banach_nested_config(1.0, 1.0, 1000, max_experts=12)
    R = s.radii
    for u in np.geomspace(1.0, R[-1], 400):
        ok = (R >= u * (1 - 1e-12)) & (R <= math.e * u * (1 + 1e-12))
        assert ok.any()


@pytest.mark.parametrize("seed", range(20))
def test_configs_run_without_range_errors(seed):
    n = 25
    d = 4
    run_oco(banach_nested_config(1.0, 1.0, n, 6, dimension=d).register(seed=seed),
            gen_linear_stream(d, n, seed=seed, alternation=0.5))
    lp = lp_grid_config(0.25, d, lambda p: 1.0, n, max_experts=3)
    run_oco(lp.register(d, seed=seed), gen_linear_stream(d, n, seed=seed))
    run_oco(pca_config(d, n).register(seed=seed), gen_pca_stream(d, n, seed=seed)[0])
    run_oco(mmw_config(d, n, 5).register(seed=seed), gen_matrix_stream(d, n, seed=seed))
    mk = mkl_config([(("linear", {}), 1.0), (("rbf", {"gamma": 2.0}), 1.0)], n, 4, dimension=d)
    run_learning(mk.register(seed=seed), gen_supervised_stream(d, n, target=np.ones(d) / 2, seed=seed))


def test_register_matches_scales():
    s = banach_nested_config(2.0, 1.0, 10, max_experts=4, dimension=2)
    st = s.register()
    np.testing.assert_allclose(st.c, np.maximum(1.0, s.radii * 2.0))
    assert isinstance(st.handles[0].learner.predict(), np.ndarray)
    st2 = s.register(seed=1)
    from multiscale.meta import oco_round

    oco_round(st2, LinearLoss([2.0, 0.0]))
