"""Splitting kernels, jump-rate factors, and their config builders."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from exchange_lattice.kernels import (
    GG_LAMBDA_R_MAX,
    GG_LAMBDA_R_MIN,
    GG_MINORIZATION,
    ConstantSumRate,
    GaspardGilbertKernel,
    GGRatioRate,
    PointMassHalfKernel,
    RateSpec,
    SqrtCutoffSumRate,
    SqrtSumRate,
    SymmetricBetaKernel,
    UniformKernel,
    UnitRatioRate,
    gg_density,
    gg_lambda_r,
    kernel_from_config,
    kernel_variance,
    kernel_variance_mc,
    minorization_ratio,
    rate,
    rate_spec_from_config,
    sample_kernel,
)

ALL_KERNELS = [
    UniformKernel(),
    SymmetricBetaKernel(3.0),
    PointMassHalfKernel(),
    GaspardGilbertKernel(),
]


def _gg_quad(beta, f):
    """Integrate f(a) * gg_density(beta, a) over [0, 1]."""
    val, _ = integrate.quad(
        lambda a: f(a) * gg_density(beta, a),
        0.0,
        1.0,
        points=[beta, 1.0 - beta],
        limit=200,
    )
    return val


def test_gg_density_point_values():
    # min(1, sqrt(.25/.5)) = sqrt(1/2), max(b,1-b) = 1/2
    assert gg_density(0.5, 0.25) == pytest.approx(1.5 * math.sqrt(0.5), rel=1e-15)
    # min term saturates at 1: 1.5 / (0.5 + 0.75)
    assert gg_density(0.25, 0.5) == pytest.approx(1.2, rel=1e-15)
    # boundary convention: at beta in {0, 1} the density is flat 1
    a = np.linspace(0.0, 1.0, 11)
    assert np.allclose(gg_density(0.0, a), 1.0, atol=0.0)
    assert np.allclose(gg_density(1.0, a), 1.0, atol=0.0)


def test_gg_density_bounded_by_envelope():
    b = np.linspace(0.0, 1.0, 201)[:, None]
    a = np.linspace(0.0, 1.0, 201)[None, :]
    dens = gg_density(b, a)
    assert np.all(dens >= 0.0)
    assert np.all(dens <= 1.5 + 1e-15)


@pytest.mark.parametrize("beta", [0.0, 0.03, 0.25, 0.5, 0.77, 1.0])
def test_gg_density_normalized(beta):
    assert _gg_quad(beta, lambda a: 1.0) == pytest.approx(1.0, abs=1e-9)


def test_gg_density_validation():
    with pytest.raises(ValueError):
        gg_density(-0.1, 0.5)
    with pytest.raises(ValueError):
        gg_density(0.5, 1.1)
    with pytest.raises(ValueError):
        gg_density(np.nan, 0.5)


def test_gg_lambda_r_extremes():
    assert gg_lambda_r(0.5) == pytest.approx(GG_LAMBDA_R_MIN, rel=1e-15)
    assert gg_lambda_r(0.0) == pytest.approx(GG_LAMBDA_R_MAX, rel=1e-15)
    assert gg_lambda_r(1.0) == pytest.approx(GG_LAMBDA_R_MAX, rel=1e-15)
    grid = gg_lambda_r(np.linspace(0.0, 1.0, 10001))
    assert grid.min() >= GG_LAMBDA_R_MIN - 1e-12
    assert grid.max() <= GG_LAMBDA_R_MAX + 1e-12


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.name)
def test_kernel_mean_one_half(kernel):
    rng = np.random.default_rng(17)
    draws = np.asarray(kernel.sample(np.full(20_000, 0.3), rng))
    se = max(float(draws.std()) / math.sqrt(draws.size), 1e-12)
    assert abs(float(draws.mean()) - 0.5) <= 4.0 * se + 1e-12


@pytest.mark.parametrize("kernel", ALL_KERNELS, ids=lambda k: k.name)
def test_kernel_sample_shapes(kernel):
    rng = np.random.default_rng(2)
    out = kernel.sample(0.4, rng)
    assert isinstance(out, float)
    out = kernel.sample(np.full((3, 5), 0.4), rng)
    assert np.shape(out) == (3, 5)
    assert sample_kernel(kernel, 0.25, rng) is not None


def test_uniform_and_beta_sampler_laws():
    rng = np.random.default_rng(29)
    u = UniformKernel().sample(np.full(50_000, 0.5), rng)
    assert stats.kstest(u, stats.uniform.cdf).pvalue > 1e-3
    b = SymmetricBetaKernel(3.0).sample(np.full(50_000, 0.5), rng)
    assert stats.kstest(b, lambda v: stats.beta.cdf(v, 1.5, 1.5)).pvalue > 1e-3


def test_point_mass_sampler():
    rng = np.random.default_rng(1)
    out = PointMassHalfKernel().sample(np.zeros(100), rng)
    assert np.all(out == 0.5)


@pytest.mark.parametrize("beta", [0.08, 0.5, 0.9])
def test_gg_sampler_moments_match_density(beta):
    rng = np.random.default_rng(101)
    draws = GaspardGilbertKernel().sample(np.full(200_000, beta), rng)
    for k in (1, 2, 3):
        exact = _gg_quad(beta, lambda a: a**k)
        pk = draws**k
        se = float(pk.std()) / math.sqrt(pk.size)
        assert abs(float(pk.mean()) - exact) <= 4.0 * se


def test_kernel_variance_closed_forms():
    assert kernel_variance(UniformKernel()) == pytest.approx(1.0 / 12.0, rel=1e-15)
    assert kernel_variance(SymmetricBetaKernel(3.0)) == pytest.approx(1.0 / 16.0, rel=1e-15)
    # Beta(1, 1) is the uniform law, so the variances must agree.
    assert kernel_variance(SymmetricBetaKernel(2.0)) == pytest.approx(1.0 / 12.0, rel=1e-15)
    assert kernel_variance(PointMassHalfKernel()) == 0.0
    with pytest.raises(ValueError, match="ratio-dependent"):
        kernel_variance(GaspardGilbertKernel())


def test_kernel_variance_mc():
    rng = np.random.default_rng(13)
    var, se = kernel_variance_mc(UniformKernel(), 0.5, rng, n_draws=200_000)
    assert abs(var - 1.0 / 12.0) <= 4.0 * se
    beta = 0.5
    m1 = _gg_quad(beta, lambda a: a)
    m2 = _gg_quad(beta, lambda a: a * a)
    var, se = kernel_variance_mc(GaspardGilbertKernel(), beta, rng, n_draws=200_000)
    assert abs(var - (m2 - m1 * m1)) <= 4.0 * se


def test_minorization_ratio_gg():
    out = minorization_ratio(GaspardGilbertKernel(), 2048)
    # Grid minimum can only sit above the continuum infimum pi/4.
    assert out >= GG_MINORIZATION - 1e-9
    assert out <= GG_MINORIZATION + 1e-4


def test_minorization_ratio_other_kernels():
    # Beta(3/2, 3/2) *is* the d=3 ratio law, so the ratio is identically 1.
    assert minorization_ratio(SymmetricBetaKernel(3.0), 512) == pytest.approx(1.0, rel=1e-12)
    out = minorization_ratio(UniformKernel(), 2048)
    assert out >= GG_MINORIZATION - 1e-9
    assert out <= GG_MINORIZATION + 1e-4
    with pytest.raises(ValueError, match="density"):
        minorization_ratio(PointMassHalfKernel(), 512)
    with pytest.raises(ValueError, match="grid_size"):
        minorization_ratio(UniformKernel(), 50)


def test_sum_rate_families():
    c = ConstantSumRate(2.0)
    assert c.is_constant and c.floor == 2.0
    assert np.all(c(np.array([0.0, 1.0, 9.0])) == 2.0)
    assert c.describe() == "constant(2)"
    for bad in (0.0, -1.0, math.inf):
        with pytest.raises(ValueError):
            ConstantSumRate(bad)

    sc = SqrtCutoffSumRate(1.5)
    assert not sc.is_constant and sc.floor == 1.5
    assert np.allclose(sc(np.array([0.0, 1.0, 4.0, 9.0])), [1.5, 1.5, 2.0, 3.0])
    with pytest.raises(ValueError):
        SqrtCutoffSumRate(0.0)

    sq = SqrtSumRate()
    assert sq.floor == 0.0
    assert np.allclose(sq(np.array([0.0, 4.0])), [0.0, 2.0])
    assert sq.describe() == "sqrt"


def test_ratio_rate_families():
    unit = UnitRatioRate()
    assert unit.min_value == unit.max_value == 1.0
    assert np.all(unit(np.linspace(0, 1, 5)) == 1.0)
    gg = GGRatioRate()
    assert gg.min_value == GG_LAMBDA_R_MIN
    assert gg.max_value == GG_LAMBDA_R_MAX
    assert np.allclose(gg(np.array([0.5])), [gg_lambda_r(0.5)])


def test_rate_spec_product_and_conventions():
    spec = RateSpec(SqrtSumRate(), GGRatioRate())
    # beta := 1/2 at an empty bond, and sqrt(0) kills the rate there.
    assert rate(spec, 0.0, 0.0) == 0.0
    assert rate(spec, 2.0, 0.0) == pytest.approx(math.sqrt(2.0) * gg_lambda_r(1.0), rel=1e-15)
    out = spec.bond_rates(np.array([1.0, 0.0]), np.array([3.0, 0.0]))
    assert out[0] == pytest.approx(2.0 * gg_lambda_r(0.25), rel=1e-15)
    assert out[1] == 0.0
    with pytest.raises(ValueError, match="nonnegative"):
        spec.bond_rates(np.array([-1.0]), np.array([1.0]))

    const = RateSpec(ConstantSumRate(3.0), UnitRatioRate())
    assert const.is_constant and const.constant_value == 3.0
    assert const.floor == 3.0
    assert const.describe() == "constant(3)"

    tilted = RateSpec(SqrtCutoffSumRate(1.0), GGRatioRate())
    assert not tilted.is_constant
    with pytest.raises(ValueError):
        _ = tilted.constant_value
    assert tilted.floor == pytest.approx(GG_LAMBDA_R_MIN, rel=1e-15)
    assert tilted.describe() == "sqrt_cutoff(1)*gg"


def test_kernel_from_config():
    assert isinstance(kernel_from_config({"type": "uniform"}), UniformKernel)
    k = kernel_from_config({"type": "beta", "d": 3})
    assert isinstance(k, SymmetricBetaKernel) and k.dim_d == 3.0
    assert isinstance(kernel_from_config({"type": "point_half"}), PointMassHalfKernel)
    assert isinstance(kernel_from_config({"type": "gg"}), GaspardGilbertKernel)
    with pytest.raises(ValueError, match="requires field 'd'"):
        kernel_from_config({"type": "beta"})
    with pytest.raises(ValueError, match="unknown kernel type"):
        kernel_from_config({"type": "cauchy"})
    with pytest.raises(ValueError, match="unknown config fields"):
        kernel_from_config({"type": "uniform", "d": 2})
    with pytest.raises(ValueError, match="'type'"):
        kernel_from_config({})


def test_rate_spec_from_config():
    uni = kernel_from_config({"type": "uniform"})
    gg = kernel_from_config({"type": "gg"})
    spec = rate_spec_from_config({"type": "constant", "lambda": 2.0}, uni)
    assert spec.is_constant and spec.constant_value == 2.0
    # The billiard kernel always carries its ratio factor.
    spec = rate_spec_from_config({"type": "constant", "lambda": 2.0}, gg)
    assert isinstance(spec.lambda_r, GGRatioRate) and not spec.is_constant
    spec = rate_spec_from_config({"type": "sqrt_cutoff", "lambda_min": 0.5}, gg)
    assert spec.floor == pytest.approx(0.5 * GG_LAMBDA_R_MIN, rel=1e-15)
    spec = rate_spec_from_config({"type": "sqrt"}, uni)
    assert spec.floor == 0.0
    with pytest.raises(ValueError, match="requires field 'lambda'"):
        rate_spec_from_config({"type": "constant"}, uni)
    with pytest.raises(ValueError, match="unknown rate type"):
        rate_spec_from_config({"type": "linear"}, uni)
    with pytest.raises(ValueError, match="unknown config fields"):
        rate_spec_from_config({"type": "sqrt", "lambda": 1.0}, uni)
