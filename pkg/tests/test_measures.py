"""Equilibrium laws, their marginals, detailed balance, and stationarity checks."""

import math

import numpy as np
import pytest
from scipy import integrate, special, stats

from exchange_lattice.kernels import (
    GGRatioRate,
    GaspardGilbertKernel,
    PointMassHalfKernel,
    SymmetricBetaKernel,
    UniformKernel,
    UnitRatioRate,
    ConstantSumRate,
    RateSpec,
    SqrtCutoffSumRate,
    gg_lambda_r,
)
from exchange_lattice.measures import (
    CheckResult,
    GammaProductSpec,
    MicrocanonicalSpec,
    RatioLaw,
    detailed_balance_residual,
    flux_asymmetry_grid,
    gamma_product_array,
    ks_critical_value,
    microcanonical_array,
    microcanonical_sampler,
    ratio_marginal_cdf,
    ratio_marginal_moment,
    sample_gamma_product,
    sample_microcanonical,
    site_marginal_cdf,
    site_marginal_moment,
    stationarity_test,
)
from exchange_lattice.simulate import Model
from exchange_lattice.state import EnergyState


def _reference_model(lam=1.0, kernel=None):
    return Model(kernel or UniformKernel(), RateSpec(ConstantSumRate(lam), UnitRatioRate()))


def test_spec_validation():
    with pytest.raises(ValueError):
        GammaProductSpec(dim_d=0.0, scale_eps=1.0)
    with pytest.raises(ValueError):
        GammaProductSpec(dim_d=3.0, scale_eps=-1.0)
    with pytest.raises(ValueError):
        MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=1)
    with pytest.raises(ValueError):
        MicrocanonicalSpec(dim_d=math.inf, epsilon=1.0, n_sites=4)


def test_gamma_product_moments():
    spec = GammaProductSpec(dim_d=3.0, scale_eps=0.8)
    rng = np.random.default_rng(4)
    x = gamma_product_array(spec, 4, 50_000, rng)
    assert x.shape == (50_000, 4)
    mean, var = 1.5 * 0.8, 1.5 * 0.8**2
    flat = x.ravel()
    se = flat.std() / math.sqrt(flat.size)
    assert abs(flat.mean() - mean) <= 4 * se
    assert abs(flat.var() - var) <= 0.02 * var
    state = sample_gamma_product(spec, 4, rng)
    assert isinstance(state, EnergyState) and state.n_sites == 4


@pytest.mark.parametrize("n,eps", [(2, 1.0), (8, 1.0), (33, 0.37)])
def test_microcanonical_totals_exact(n, eps):
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=eps, n_sites=n)
    rng = np.random.default_rng(n)
    x = microcanonical_array(spec, 1000, rng)
    assert np.all(x >= 0.0)
    total = n * eps
    for row in x:
        assert math.fsum(row) == total  # pinned, not just close


def test_microcanonical_marginals_match_dirichlet():
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=6)
    rng = np.random.default_rng(9)
    x = microcanonical_array(spec, 200_000, rng)
    v = x[:, 0]
    for k in (1, 2, 3, 4):
        exact = site_marginal_moment(spec, k)
        pk = v**k
        se = pk.std() / math.sqrt(pk.size)
        assert abs(pk.mean() - exact) <= 4 * se
    state = sample_microcanonical(spec, rng)
    assert math.fsum(state.energies) == 6.0
    sampler = microcanonical_sampler(spec)
    block = sampler(32, rng)
    assert block.shape == (32, 6)


def test_site_marginal_closed_form():
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=8)
    # N*eps*Beta(3/2, 21/2): second moment 64 * (1.5*2.5)/(12*13) = 240/156.
    assert site_marginal_moment(spec, 2) == pytest.approx(240.0 / 156.0, rel=1e-14)
    assert site_marginal_moment(spec, 1) == pytest.approx(1.0, rel=1e-14)
    a, b = 1.5, 10.5
    for k in (1, 2, 3, 4):
        scipy_val = stats.beta.moment(k, a, b) * 8.0**k
        assert site_marginal_moment(spec, k) == pytest.approx(scipy_val, rel=1e-10)
    cdf = site_marginal_cdf(spec)
    v = np.array([0.5, 1.0, 3.0])
    assert np.allclose(cdf(v), stats.beta.cdf(v / 8.0, a, b), rtol=1e-12)


def test_ratio_marginal_closed_form():
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=5)
    assert ratio_marginal_moment(spec, 1) == pytest.approx(0.5, rel=1e-15)
    assert ratio_marginal_moment(spec, 2) == pytest.approx(0.3125, rel=1e-14)
    for k in (1, 2, 3):
        assert ratio_marginal_moment(spec, k) == pytest.approx(
            stats.beta.moment(k, 1.5, 1.5), rel=1e-10
        )
    cdf = ratio_marginal_cdf(spec)
    assert cdf(0.5) == pytest.approx(0.5, rel=1e-12)


def test_pair_ratio_independent_of_sum():
    # Under the Gamma product, a bond's ratio and sum are independent.
    rng = np.random.default_rng(31)
    x = gamma_product_array(GammaProductSpec(dim_d=3.0, scale_eps=1.0), 2, 100_000, rng)
    s = x.sum(axis=1)
    b = x[:, 0] / s
    corr = np.corrcoef(b, s)[0, 1]
    assert abs(corr) <= 4.0 / math.sqrt(s.size)
    assert stats.kstest(b, lambda v: stats.beta.cdf(v, 1.5, 1.5)).pvalue > 1e-3
    assert stats.kstest(s, lambda v: stats.gamma.cdf(v, 3.0)).pvalue > 1e-3


def test_ratio_law_pdfs_and_normalizer():
    law = RatioLaw(dim_d=3.0, scale_eps=0.9)
    s = np.array([0.3, 1.0, 4.0])
    assert np.allclose(law.nu_s_pdf(s), stats.gamma.pdf(s, 3.0, scale=0.9), rtol=1e-12)
    bpts = np.array([0.2, 0.5, 0.8])
    assert np.allclose(law.nu_r_pdf(bpts), stats.beta.pdf(bpts, 1.5, 1.5), rtol=1e-12)
    # Flat ratio factor: p is nu_r itself.
    assert law.normalizer == 1.0
    assert np.allclose(law.p_pdf(bpts), law.nu_r_pdf(bpts), rtol=1e-15)

    tilted = RatioLaw(dim_d=3.0, scale_eps=1.0, lambda_r=GGRatioRate())
    direct, _ = integrate.quad(
        lambda b: stats.beta.pdf(b, 1.5, 1.5) * gg_lambda_r(b), 0.0, 1.0, limit=200
    )
    assert tilted.normalizer == pytest.approx(direct, rel=1e-9)
    assert tilted.normalizer == pytest.approx(0.6018022224509398, rel=1e-10)
    mass, _ = integrate.quad(lambda b: float(tilted.p_pdf(b)), 0.0, 1.0, limit=200)
    assert mass == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        RatioLaw(dim_d=-1.0, scale_eps=1.0)


def test_flux_symmetry_reversible_pairs():
    # Billiard kernel with its rate tilt: residual at round-off level.
    res = detailed_balance_residual(GaspardGilbertKernel(), GGRatioRate(), 400)
    assert res <= 1e-12
    # Beta(3/2,3/2) kernel against the flat tilt at d=3: exactly symmetric.
    res = detailed_balance_residual(SymmetricBetaKernel(3.0), UnitRatioRate(), 300)
    assert res == 0.0
    # Uniform kernel is the d=2 equilibrium: symmetric at d=2 ...
    res = detailed_balance_residual(UniformKernel(), UnitRatioRate(), 300, dim_d=2.0)
    assert res <= 1e-12


def test_flux_asymmetry_detects_wrong_measure():
    # ... but visibly asymmetric against the d=3 ratio law.
    res = detailed_balance_residual(UniformKernel(), UnitRatioRate(), 300, dim_d=3.0)
    assert res > 0.1
    pts_b, pts_a, asym = flux_asymmetry_grid(UniformKernel(), UnitRatioRate(), 128)
    assert pts_b.shape == (128,) and asym.shape == (128, 128)
    assert np.allclose(asym, asym.T, atol=0.0)  # |F - F^T| is symmetric
    with pytest.raises(ValueError, match="density"):
        detailed_balance_residual(PointMassHalfKernel(), UnitRatioRate(), 128)
    with pytest.raises(ValueError, match="grid_size"):
        detailed_balance_residual(UniformKernel(), UnitRatioRate(), 1)


def test_ks_critical_value():
    assert ks_critical_value(400) == pytest.approx(special.kolmogi(0.01) / 20.0, rel=1e-12)
    assert ks_critical_value(100, level=0.05) == pytest.approx(
        special.kolmogi(0.05) / 10.0, rel=1e-12
    )
    assert ks_critical_value(100) > ks_critical_value(10_000)


def test_check_result_serialization():
    c = CheckResult(test="site_moment_1", n=10, statistic=1.5, threshold=3.0, passed=True)
    d = c.to_dict()
    assert d == {
        "test": "site_moment_1",
        "n": 10,
        "statistic": 1.5,
        "threshold": 3.0,
        "pass": True,
    }


def test_stationarity_passes_reference_model():
    # beta(d=3) pairing preserves the d=3 simplex law; uniform would not
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=5)
    model = _reference_model(kernel=SymmetricBetaKernel(3.0))
    report = stationarity_test(model, spec, horizon=3.0, n_replicas=3000, seed=42)
    assert report.passed, [c.to_dict() for c in report.checks if not c.passed]
    assert len(report.checks) == 10
    d = report.to_dict()
    assert d["pass"] is True
    assert d["claimed"]["dim_d"] == 3.0
    assert report.final_site.shape == (3000,)


def test_stationarity_rejects_wrong_dimension():
    # Claimed d=1 is not invariant for the uniform-kernel dynamics: the
    # evolved marginals drift toward d=2 and the checks catch it.
    spec = MicrocanonicalSpec(dim_d=1.0, epsilon=1.0, n_sites=5)
    report = stationarity_test(_reference_model(), spec, horizon=3.0, n_replicas=3000, seed=42)
    assert not report.passed
    n_failed = sum(not c.passed for c in report.checks)
    assert n_failed >= 3


def test_stationarity_billiard_model():
    model = Model(GaspardGilbertKernel(), RateSpec(SqrtCutoffSumRate(1.0), GGRatioRate()))
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=3)
    report = stationarity_test(model, spec, horizon=4.0, n_replicas=2000, seed=7)
    assert report.passed, [c.to_dict() for c in report.checks if not c.passed]


def test_stationarity_validation():
    spec = MicrocanonicalSpec(dim_d=3.0, epsilon=1.0, n_sites=4)
    with pytest.raises(ValueError):
        stationarity_test(_reference_model(), spec, horizon=0.0, n_replicas=100, seed=0)
    with pytest.raises(ValueError):
        stationarity_test(_reference_model(), spec, horizon=1.0, n_replicas=1, seed=0)
