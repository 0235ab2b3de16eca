"""Reference measures of the exchange dynamics and statistical verification.

For ``d`` degrees of freedom per site the product of Gamma(d/2) laws is the
grand-canonical equilibrium; conditioning it on a fixed mean gives the
microcanonical law on the simplex, which is a scaled Dirichlet(d/2, ..., d/2)
vector.  The bond-level picture factorizes into a sum law ``nu_s`` (Gamma of
shape d), a ratio law ``nu_r`` (symmetric Beta of parameter d/2), and the
tilted ratio law ``p`` proportional to ``nu_r * Lambda_r``, which is what the
splitting kernel must preserve for the product measure to be reversible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special, stats

from .kernels import AlphaKernel, RatioRate
from .simulate import Model, bond_ratio, ensemble_paths, site_energy
from .state import EnergyState

__all__ = [
    "GammaProductSpec",
    "MicrocanonicalSpec",
    "sample_gamma_product",
    "gamma_product_array",
    "sample_microcanonical",
    "microcanonical_array",
    "microcanonical_sampler",
    "site_marginal_moment",
    "site_marginal_cdf",
    "ratio_marginal_moment",
    "ratio_marginal_cdf",
    "RatioLaw",
    "detailed_balance_residual",
    "flux_asymmetry_grid",
    "CheckResult",
    "StationarityReport",
    "stationarity_test",
    "ks_critical_value",
]


@dataclass(frozen=True)
class GammaProductSpec:
    """Product of iid Gamma(dim_d/2, scale_eps) site energies."""

    dim_d: float
    scale_eps: float

    def __post_init__(self) -> None:
        if not (self.dim_d > 0.0 and math.isfinite(self.dim_d)):
            raise ValueError("dim_d must be positive and finite")
        if not (self.scale_eps > 0.0 and math.isfinite(self.scale_eps)):
            raise ValueError("scale_eps must be positive and finite")


@dataclass(frozen=True)
class MicrocanonicalSpec:
    """Gamma product conditioned on mean energy ``epsilon`` over ``n_sites``."""

    dim_d: float
    epsilon: float
    n_sites: int

    def __post_init__(self) -> None:
        if not (self.dim_d > 0.0 and math.isfinite(self.dim_d)):
            raise ValueError("dim_d must be positive and finite")
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be positive and finite")
        if self.n_sites < 2:
            raise ValueError("need at least two sites")


def gamma_product_array(
    spec: GammaProductSpec, n_sites: int, size: int, rng: np.random.Generator
) -> np.ndarray:
    if n_sites < 2:
        raise ValueError("need at least two sites")
    return rng.gamma(spec.dim_d / 2.0, scale=spec.scale_eps, size=(size, n_sites))


def sample_gamma_product(
    spec: GammaProductSpec, n_sites: int, rng: np.random.Generator
) -> EnergyState:
    return EnergyState(gamma_product_array(spec, n_sites, 1, rng)[0])


def _pin_row_total(row: np.ndarray, total: float) -> None:
    """Nudge the largest entry so the exactly-rounded row sum equals ``total``."""
    j = int(np.argmax(row))
    for _ in range(4):
        err = math.fsum(row) - total
        if err == 0.0:
            return
        row[j] -= err
    # a tie in the rounded sum can make the correction above oscillate by one
    # ulp; walk the pivot one float at a time instead
    for _ in range(64):
        err = math.fsum(row) - total
        if err == 0.0:
            return
        row[j] = math.nextafter(row[j], -math.inf if err > 0.0 else math.inf)
    raise ArithmeticError("row total failed to pin")


def microcanonical_array(
    spec: MicrocanonicalSpec, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Rows are scaled Dirichlet(d/2, ..., d/2) vectors with exact totals."""
    g = rng.gamma(spec.dim_d / 2.0, size=(size, spec.n_sites))
    total = spec.n_sites * spec.epsilon
    x = g * (total / g.sum(axis=1, keepdims=True))
    for row in x:
        _pin_row_total(row, total)
    return x


def sample_microcanonical(spec: MicrocanonicalSpec, rng: np.random.Generator) -> EnergyState:
    return EnergyState(microcanonical_array(spec, 1, rng)[0])


def microcanonical_sampler(spec: MicrocanonicalSpec):
    """Initial-condition callable for the ensemble engines."""

    def sampler(size: int, rng: np.random.Generator) -> np.ndarray:
        return microcanonical_array(spec, size, rng)

    return sampler


# --- closed-form marginals of the microcanonical law ------------------------


def _site_beta_params(spec: MicrocanonicalSpec) -> tuple[float, float]:
    a = spec.dim_d / 2.0
    return a, (spec.n_sites - 1) * a


def site_marginal_moment(spec: MicrocanonicalSpec, order: int) -> float:
    """E[x_1^k]: the site energy is ``N eps`` times a Beta(a, (N-1)a) variable."""
    a, b = _site_beta_params(spec)
    out = (spec.n_sites * spec.epsilon) ** order
    for j in range(order):
        out *= (a + j) / (a + b + j)
    return out


def site_marginal_cdf(spec: MicrocanonicalSpec):
    a, b = _site_beta_params(spec)
    scale = spec.n_sites * spec.epsilon
    return lambda v: stats.beta.cdf(np.asarray(v) / scale, a, b)


def ratio_marginal_moment(spec: MicrocanonicalSpec, order: int) -> float:
    """E[(x_1/(x_1+x_2))^k]: the bond ratio is Beta(d/2, d/2)."""
    a = spec.dim_d / 2.0
    out = 1.0
    for j in range(order):
        out *= (a + j) / (2.0 * a + j)
    return out


def ratio_marginal_cdf(spec: MicrocanonicalSpec):
    a = spec.dim_d / 2.0
    return lambda v: stats.beta.cdf(np.asarray(v), a, a)


# --- bond-level laws ---------------------------------------------------------


@dataclass(frozen=True)
class RatioLaw:
    """Sum, ratio, and tilted-ratio laws of a bond at equilibrium.

    ``lambda_r=None`` means a flat ratio factor; then ``p`` coincides with
    ``nu_r``.
    """

    dim_d: float
    scale_eps: float
    lambda_r: RatioRate | None = None

    def __post_init__(self) -> None:
        if not (self.dim_d > 0.0 and math.isfinite(self.dim_d)):
            raise ValueError("dim_d must be positive and finite")
        if not (self.scale_eps > 0.0 and math.isfinite(self.scale_eps)):
            raise ValueError("scale_eps must be positive and finite")

    def nu_s_pdf(self, s):
        return stats.gamma.pdf(np.asarray(s, dtype=np.float64), self.dim_d, scale=self.scale_eps)

    def nu_r_pdf(self, b):
        half = self.dim_d / 2.0
        return stats.beta.pdf(np.asarray(b, dtype=np.float64), half, half)

    @cached_property
    def normalizer(self) -> float:
        """Z = integral of ``nu_r * Lambda_r``; 1 for a flat ratio factor."""
        if self.lambda_r is None:
            return 1.0
        z, _ = integrate.quad(
            lambda b: float(self.nu_r_pdf(b)) * float(self.lambda_r(b)),
            0.0,
            1.0,
            points=[0.5],
            limit=200,
        )
        return z

    def p_pdf(self, b):
        base = self.nu_r_pdf(b)
        if self.lambda_r is None:
            return base
        return base * np.asarray(self.lambda_r(np.asarray(b, dtype=np.float64))) / self.normalizer


def _midpoint_grid(grid_size: int) -> np.ndarray:
    return (np.arange(grid_size) + 0.5) / grid_size


def flux_asymmetry_grid(
    kernel: AlphaKernel, lambda_r, grid_size: int, dim_d: float = 3.0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """|F(b, a) - F(a, b)| with F(b, a) = nu_r(b) Lambda_r(b) density(b, a).

    F is the equilibrium flux of the bond-ratio chain for the ``dim_d``
    product measure (up to a constant); its symmetry is detailed balance.
    Evaluated on a midpoint grid, which keeps densities with endpoint
    singularities finite.
    """
    if not kernel.has_density:
        raise ValueError(f"kernel {kernel.name!r} has no density")
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    half = dim_d / 2.0
    pts = _midpoint_grid(grid_size)
    weight = stats.beta.pdf(pts, half, half) * np.asarray(lambda_r(pts))
    flux = weight[:, None] * kernel.density(pts[:, None], pts[None, :])
    return pts, pts, np.abs(flux - flux.T)


def detailed_balance_residual(
    kernel: AlphaKernel, lambda_r, grid_size: int, dim_d: float = 3.0
) -> float:
    """Max flux asymmetry over the grid; ~1e-15 for a reversible pair."""
    _, _, asym = flux_asymmetry_grid(kernel, lambda_r, grid_size, dim_d)
    return float(asym.max())


# --- stationarity -------------------------------------------------------------


def ks_critical_value(n: int, level: float = 0.01) -> float:
    """Asymptotic one-sample Kolmogorov-Smirnov critical value."""
    return float(special.kolmogi(level)) / math.sqrt(n)


@dataclass(frozen=True)
class CheckResult:
    test: str
    n: int
    statistic: float
    threshold: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "n": self.n,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class StationarityReport:
    model: str
    claimed: MicrocanonicalSpec
    horizon: float
    n_replicas: int
    checks: tuple[CheckResult, ...]
    final_site: np.ndarray
    final_ratio: np.ndarray

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "claimed": {
                "dim_d": self.claimed.dim_d,
                "epsilon": self.claimed.epsilon,
                "n_sites": self.claimed.n_sites,
            },
            "horizon": self.horizon,
            "n_replicas": self.n_replicas,
            "pass": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _moment_checks(
    name: str, values: np.ndarray, exact, n_moments: int = 4
) -> list[CheckResult]:
    out = []
    n = values.size
    for k in range(1, n_moments + 1):
        powered = values**k
        se = float(np.std(powered, ddof=1)) / math.sqrt(n)
        z = abs(float(powered.mean()) - exact(k)) / se
        out.append(
            CheckResult(
                test=f"{name}_moment_{k}", n=n, statistic=z, threshold=3.0, passed=z <= 3.0
            )
        )
    return out


def _ks_check(name: str, values: np.ndarray, cdf) -> CheckResult:
    stat = float(stats.kstest(values, cdf).statistic)
    crit = ks_critical_value(values.size)
    return CheckResult(
        test=f"{name}_ks", n=values.size, statistic=stat, threshold=crit, passed=stat <= crit
    )


def stationarity_test(
    model: Model,
    spec: MicrocanonicalSpec,
    horizon: float,
    n_replicas: int,
    seed: int,
    threads: int = 1,
) -> StationarityReport:
    """Start replicas from the claimed law, evolve, compare marginals at T.

    The first-site energy and the first-bond ratio at time ``horizon`` are
    tested against the claimed law's closed-form marginals: first four moments
    within three standard errors, Kolmogorov-Smirnov below the 1% critical
    value.  A wrong claim fails because the dynamics drags the marginals
    toward the true equilibrium.
    """
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    if n_replicas < 2:
        raise ValueError("need at least two replicas")
    paths = ensemble_paths(
        model,
        microcanonical_sampler(spec),
        [site_energy(1), bond_ratio(1)],
        horizon,
        n_samples=8,
        n_replicas=n_replicas,
        seed=seed,
        threads=threads,
    )
    final_site = paths.values[:, -1, 0]
    final_ratio = paths.values[:, -1, 1]
    checks: list[CheckResult] = []
    checks += _moment_checks("site", final_site, lambda k: site_marginal_moment(spec, k))
    checks.append(_ks_check("site", final_site, site_marginal_cdf(spec)))
    checks += _moment_checks("ratio", final_ratio, lambda k: ratio_marginal_moment(spec, k))
    checks.append(_ks_check("ratio", final_ratio, ratio_marginal_cdf(spec)))
    return StationarityReport(
        model=model.describe(),
        claimed=spec,
        horizon=horizon,
        n_replicas=n_replicas,
        checks=tuple(checks),
        final_site=final_site,
        final_ratio=final_ratio,
    )
