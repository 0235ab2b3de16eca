"""Splitting kernels and jump-rate specifications for pair exchanges.

A splitting kernel draws the fraction ``alpha`` handed to the left site of a
bond; it may depend on the bond's pre-exchange energy ratio ``beta``.  All
admissible kernels have mean 1/2, which is what makes the averaging dynamics
contract.  The jump rate of a bond factors as ``Lambda_s(pair sum) *
Lambda_r(pair ratio)``.

Built-in kernels:

- ``UniformKernel``: flat on [0, 1], variance 1/12.
- ``SymmetricBetaKernel(d)``: Beta(d/2, d/2), variance 1/(4(d+1)).
- ``PointMassHalfKernel``: deterministic even split (no density).
- ``GaspardGilbertKernel``: the ratio-dependent collision kernel of the
  three-dimensional billiard-lattice model, with closed-form density
  ``gg_density`` and rate factor ``gg_lambda_r``.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "AlphaKernel",
    "UniformKernel",
    "SymmetricBetaKernel",
    "PointMassHalfKernel",
    "GaspardGilbertKernel",
    "gg_density",
    "gg_lambda_r",
    "sample_kernel",
    "kernel_variance",
    "kernel_variance_mc",
    "SumRate",
    "ConstantSumRate",
    "SqrtCutoffSumRate",
    "SqrtSumRate",
    "RatioRate",
    "UnitRatioRate",
    "GGRatioRate",
    "RateSpec",
    "rate",
    "minorization_ratio",
    "kernel_from_config",
    "rate_spec_from_config",
    "GG_ENVELOPE",
    "GG_LAMBDA_R_MIN",
    "GG_LAMBDA_R_MAX",
    "GG_MINORIZATION",
]

# Flat envelope bounding gg_density from above; acceptance of the rejection
# sampler is exactly 1/GG_ENVELOPE on average.
GG_ENVELOPE = 1.5
GG_LAMBDA_R_MIN = math.sqrt(math.pi) / 3.0
GG_LAMBDA_R_MAX = math.sqrt(2.0 * math.pi) / 4.0
GG_MINORIZATION = math.pi / 4.0

# Density of the d=3 equilibrium ratio law, (8/pi) * sqrt(b(1-b)).
_NU_R3_COEF = 8.0 / math.pi


def _check_unit_interval(name: str, value: np.ndarray) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"{name} must be finite")
    if np.any(value < 0.0) or np.any(value > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")


def gg_density(beta, alpha):
    """Splitting density of the billiard-lattice kernel.

    ``(3/2) * min(1, sqrt(min(a,1-a) / min(b,1-b))) / (1/2 + max(b,1-b))``,
    with the min-term set to 1 at ``b in {0, 1}`` (its continuity limit).
    Bounded above by 3/2; integrates to 1 in ``alpha`` for every ``beta``.
    """
    b = np.asarray(beta, dtype=np.float64)
    a = np.asarray(alpha, dtype=np.float64)
    _check_unit_interval("beta", b)
    _check_unit_interval("alpha", a)
    b, a = np.broadcast_arrays(b, a)
    m_b = np.minimum(b, 1.0 - b)
    big_b = np.maximum(b, 1.0 - b)
    m_a = np.minimum(a, 1.0 - a)
    safe = np.where(m_b > 0.0, m_b, 1.0)
    term = np.minimum(1.0, np.sqrt(m_a / safe))
    term = np.where(m_b > 0.0, term, 1.0)
    out = GG_ENVELOPE * term / (0.5 + big_b)
    return float(out) if out.ndim == 0 else out


def gg_lambda_r(beta):
    """Ratio factor of the billiard-lattice jump rate.

    ``(sqrt(2 pi)/6) * (1/2 + max(b,1-b)) / sqrt(max(b,1-b))``; attains its
    minimum ``sqrt(pi)/3`` at ``b = 1/2`` and its maximum ``sqrt(2 pi)/4`` at
    the endpoints.
    """
    b = np.asarray(beta, dtype=np.float64)
    _check_unit_interval("beta", b)
    big = np.maximum(b, 1.0 - b)
    out = (math.sqrt(2.0 * math.pi) / 6.0) * (0.5 + big) / np.sqrt(big)
    return float(out) if out.ndim == 0 else out


class AlphaKernel(abc.ABC):
    """Law of the left-share fraction drawn at each exchange."""

    name: str = "kernel"
    state_independent: bool = True
    has_density: bool = True

    @abc.abstractmethod
    def sample(self, beta, rng: np.random.Generator):
        """Draw alpha given the pre-exchange ratio; vectorizes over ``beta``."""

    def density(self, beta, alpha):
        raise ValueError(f"kernel {self.name!r} has no density")

    def variance(self) -> float | None:
        """Closed-form variance for state-independent kernels, else None."""
        return None

    def describe(self) -> str:
        return self.name


def _shaped_iid(draw, beta):
    """Run ``draw(size)`` with the shape of ``beta``; scalar in, scalar out."""
    shape = np.shape(beta)
    out = draw(shape)
    return float(out) if shape == () else out


@dataclass(frozen=True)
class UniformKernel(AlphaKernel):
    name = "uniform"

    def sample(self, beta, rng: np.random.Generator):
        return _shaped_iid(lambda size: rng.uniform(size=size), beta)

    def density(self, beta, alpha):
        b = np.asarray(beta, dtype=np.float64)
        a = np.asarray(alpha, dtype=np.float64)
        _check_unit_interval("beta", b)
        _check_unit_interval("alpha", a)
        out = np.ones(np.broadcast_shapes(b.shape, a.shape))
        return float(out) if out.ndim == 0 else out

    def variance(self) -> float:
        return 1.0 / 12.0


@dataclass(frozen=True)
class SymmetricBetaKernel(AlphaKernel):
    """Beta(d/2, d/2) splitting law; ``d`` counts degrees of freedom per site."""

    dim_d: float

    name = "beta"

    def __post_init__(self) -> None:
        if not (self.dim_d > 0.0 and math.isfinite(self.dim_d)):
            raise ValueError("dim_d must be positive and finite")

    def sample(self, beta, rng: np.random.Generator):
        # Normalized pair of Gamma(d/2) draws; same law as Generator.beta.
        half = self.dim_d / 2.0

        def draw(size):
            g1 = rng.gamma(half, size=size)
            g2 = rng.gamma(half, size=size)
            return g1 / (g1 + g2)

        return _shaped_iid(draw, beta)

    def density(self, beta, alpha):
        b = np.asarray(beta, dtype=np.float64)
        a = np.asarray(alpha, dtype=np.float64)
        _check_unit_interval("beta", b)
        _check_unit_interval("alpha", a)
        b, a = np.broadcast_arrays(b, a)
        out = np.asarray(stats.beta.pdf(a, self.dim_d / 2.0, self.dim_d / 2.0))
        return float(out) if out.ndim == 0 else out

    def variance(self) -> float:
        return 1.0 / (4.0 * (self.dim_d + 1.0))

    def describe(self) -> str:
        return f"beta(d={self.dim_d:g})"


@dataclass(frozen=True)
class PointMassHalfKernel(AlphaKernel):
    name = "point_half"
    has_density = False

    def sample(self, beta, rng: np.random.Generator):
        shape = np.shape(beta)
        return 0.5 if shape == () else np.full(shape, 0.5)

    def variance(self) -> float:
        return 0.0


@dataclass(frozen=True)
class GaspardGilbertKernel(AlphaKernel):
    """Ratio-dependent collision kernel of the 3-d billiard-lattice model."""

    name = "gg"
    state_independent = False

    def sample(self, beta, rng: np.random.Generator):
        b = np.asarray(beta, dtype=np.float64)
        _check_unit_interval("beta", b)
        scalar = b.ndim == 0
        flat = np.atleast_1d(b).ravel()
        out = np.empty(flat.shape)
        todo = np.arange(flat.size)
        # Rejection against the flat envelope: mean acceptance 2/3.
        while todo.size:
            cand = rng.uniform(size=todo.size)
            height = rng.uniform(size=todo.size) * GG_ENVELOPE
            accept = height <= gg_density(flat[todo], cand)
            out[todo[accept]] = cand[accept]
            todo = todo[~accept]
        if scalar:
            return float(out[0])
        return out.reshape(np.atleast_1d(b).shape)

    def density(self, beta, alpha):
        return gg_density(beta, alpha)


def sample_kernel(kernel: AlphaKernel, beta, rng: np.random.Generator):
    """Draw from ``kernel`` at ratio ``beta``; shape follows ``beta``."""
    return kernel.sample(beta, rng)


def kernel_variance(kernel: AlphaKernel) -> float:
    """Closed-form splitting variance of a state-independent kernel.

    Raises
    ------
    ValueError
        For ratio-dependent kernels (no single variance exists; use
        kernel_variance_mc at a fixed ratio) and for kernels without a
        closed form.
    """
    if not kernel.state_independent:
        raise ValueError(
            f"kernel {kernel.name!r} is ratio-dependent; use kernel_variance_mc"
        )
    value = kernel.variance()
    if value is None:
        raise ValueError(
            f"kernel {kernel.name!r} has no closed-form variance; "
            "use kernel_variance_mc"
        )
    return value


def kernel_variance_mc(
    kernel: AlphaKernel,
    beta: float,
    rng: np.random.Generator,
    n_draws: int = 10**6,
) -> tuple[float, float]:
    """Monte-Carlo splitting variance at a fixed ratio, with standard error."""
    draws = kernel.sample(np.full(n_draws, beta), rng)
    var = float(np.var(draws))
    centered_sq = (draws - draws.mean()) ** 2
    se = float(np.std(centered_sq) / math.sqrt(n_draws))
    return var, se


def minorization_ratio(kernel: AlphaKernel, grid_size: int) -> float:
    """Grid minimum of ``density(beta, alpha) / nu_r(alpha)``.

    ``nu_r`` is the equilibrium ratio density of the three-dimensional model,
    ``(8/pi) sqrt(a(1-a))``.  The ratio grid spans [0, 1] inclusive; the alpha
    grid uses cell midpoints, where ``nu_r`` is positive.  For the
    billiard-lattice kernel the result is ``pi/4`` up to grid resolution.
    """
    if not kernel.has_density:
        raise ValueError(f"kernel {kernel.name!r} has no density")
    if grid_size < 100:
        raise ValueError("grid_size must be at least 100")
    betas = np.linspace(0.0, 1.0, grid_size)
    alphas = (np.arange(grid_size) + 0.5) / grid_size
    dens = kernel.density(betas[:, None], alphas[None, :])
    nu_r = _NU_R3_COEF * np.sqrt(alphas * (1.0 - alphas))
    return float(np.min(dens / nu_r[None, :]))


# --- jump-rate specifications -------------------------------------------


class SumRate(abc.ABC):
    """Factor of the bond rate depending on the pair's total energy."""

    is_constant: bool = False

    @abc.abstractmethod
    def __call__(self, s: np.ndarray) -> np.ndarray: ...

    @property
    @abc.abstractmethod
    def floor(self) -> float:
        """Infimum of the factor over all pair totals ``s >= 0``."""

    @abc.abstractmethod
    def describe(self) -> str: ...


@dataclass(frozen=True)
class ConstantSumRate(SumRate):
    value: float

    is_constant = True

    def __post_init__(self) -> None:
        if not (self.value > 0.0 and math.isfinite(self.value)):
            raise ValueError("constant rate must be positive and finite")

    def __call__(self, s):
        return np.full_like(np.asarray(s, dtype=np.float64), self.value)

    @property
    def floor(self) -> float:
        return self.value

    def describe(self) -> str:
        return f"constant({self.value:g})"


@dataclass(frozen=True)
class SqrtCutoffSumRate(SumRate):
    """``max(sqrt(s), lambda_min)``: square-root growth with a positive floor."""

    lambda_min: float

    def __post_init__(self) -> None:
        if not (self.lambda_min > 0.0 and math.isfinite(self.lambda_min)):
            raise ValueError("lambda_min must be positive and finite")

    def __call__(self, s):
        return np.maximum(np.sqrt(np.asarray(s, dtype=np.float64)), self.lambda_min)

    @property
    def floor(self) -> float:
        return self.lambda_min

    def describe(self) -> str:
        return f"sqrt_cutoff({self.lambda_min:g})"


@dataclass(frozen=True)
class SqrtSumRate(SumRate):
    """Pure ``sqrt(s)``: the rate vanishes with the pair energy (no floor)."""

    def __call__(self, s):
        return np.sqrt(np.asarray(s, dtype=np.float64))

    @property
    def floor(self) -> float:
        return 0.0

    def describe(self) -> str:
        return "sqrt"


class RatioRate(abc.ABC):
    """Factor of the bond rate depending on the pair's energy ratio."""

    @abc.abstractmethod
    def __call__(self, beta: np.ndarray) -> np.ndarray: ...

    @property
    @abc.abstractmethod
    def min_value(self) -> float: ...

    @property
    @abc.abstractmethod
    def max_value(self) -> float: ...

    @abc.abstractmethod
    def describe(self) -> str: ...


@dataclass(frozen=True)
class UnitRatioRate(RatioRate):
    def __call__(self, beta):
        return np.ones_like(np.asarray(beta, dtype=np.float64))

    @property
    def min_value(self) -> float:
        return 1.0

    @property
    def max_value(self) -> float:
        return 1.0

    def describe(self) -> str:
        return "unit"


@dataclass(frozen=True)
class GGRatioRate(RatioRate):
    def __call__(self, beta):
        return np.asarray(gg_lambda_r(beta))

    @property
    def min_value(self) -> float:
        return GG_LAMBDA_R_MIN

    @property
    def max_value(self) -> float:
        return GG_LAMBDA_R_MAX

    def describe(self) -> str:
        return "gg"


@dataclass(frozen=True)
class RateSpec:
    """Bond jump rate ``Lambda_s(left + right) * Lambda_r(left / (left+right))``.

    At a doubly-zero bond the ratio is undefined; by convention it is
    evaluated at 1/2, so the rate there is the continuity limit of
    ``Lambda_s`` times a finite ratio factor (0 for the pure square-root
    rate).
    """

    lambda_s: SumRate
    lambda_r: RatioRate

    def bond_rates(self, left, right):
        left = np.asarray(left, dtype=np.float64)
        right = np.asarray(right, dtype=np.float64)
        if np.any(left < 0.0) or np.any(right < 0.0):
            raise ValueError("energies must be nonnegative")
        s = left + right
        pos = s > 0.0
        beta = np.where(pos, left / np.where(pos, s, 1.0), 0.5)
        return self.lambda_s(s) * self.lambda_r(beta)

    @property
    def is_constant(self) -> bool:
        return self.lambda_s.is_constant and isinstance(self.lambda_r, UnitRatioRate)

    @property
    def constant_value(self) -> float:
        if not self.is_constant:
            raise ValueError("rate is state-dependent")
        return self.lambda_s.floor

    @property
    def floor(self) -> float:
        """Infimum of the bond rate over all states (may be 0)."""
        return self.lambda_s.floor * self.lambda_r.min_value

    def describe(self) -> str:
        if isinstance(self.lambda_r, UnitRatioRate):
            return self.lambda_s.describe()
        return f"{self.lambda_s.describe()}*{self.lambda_r.describe()}"


def rate(spec: RateSpec, e_left: float, e_right: float) -> float:
    """Jump rate of a bond holding energies ``(e_left, e_right)``."""
    out = spec.bond_rates(float(e_left), float(e_right))
    return float(out)


# --- configuration ---------------------------------------------------------


def kernel_from_config(cfg: dict) -> AlphaKernel:
    """Build a kernel from its JSON description; unknown fields are errors."""
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ValueError("kernel config must be an object with a 'type' field")
    kind = cfg["type"]
    if kind == "uniform":
        _reject_fields(cfg, {"type"})
        return UniformKernel()
    if kind == "beta":
        _reject_fields(cfg, {"type", "d"})
        if "d" not in cfg:
            raise ValueError("kernel type 'beta' requires field 'd'")
        return SymmetricBetaKernel(float(cfg["d"]))
    if kind == "point_half":
        _reject_fields(cfg, {"type"})
        return PointMassHalfKernel()
    if kind == "gg":
        _reject_fields(cfg, {"type"})
        return GaspardGilbertKernel()
    raise ValueError(
        f"unknown kernel type {kind!r}; expected uniform | beta | point_half | gg"
    )


def rate_spec_from_config(cfg: dict, kernel: AlphaKernel) -> RateSpec:
    """Build a rate spec from its JSON description.

    The ratio factor is intrinsic to the kernel family: the billiard-lattice
    kernel carries its closed-form ratio factor, every other kernel the unit
    factor.
    """
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ValueError("rate config must be an object with a 'type' field")
    kind = cfg["type"]
    lambda_r: RatioRate = (
        GGRatioRate() if isinstance(kernel, GaspardGilbertKernel) else UnitRatioRate()
    )
    if kind == "constant":
        _reject_fields(cfg, {"type", "lambda"})
        if "lambda" not in cfg:
            raise ValueError("rate type 'constant' requires field 'lambda'")
        return RateSpec(ConstantSumRate(float(cfg["lambda"])), lambda_r)
    if kind == "sqrt_cutoff":
        _reject_fields(cfg, {"type", "lambda_min"})
        if "lambda_min" not in cfg:
            raise ValueError("rate type 'sqrt_cutoff' requires field 'lambda_min'")
        return RateSpec(SqrtCutoffSumRate(float(cfg["lambda_min"])), lambda_r)
    if kind == "sqrt":
        _reject_fields(cfg, {"type"})
        return RateSpec(SqrtSumRate(), lambda_r)
    raise ValueError(
        f"unknown rate type {kind!r}; expected constant | sqrt_cutoff | sqrt"
    )


def _reject_fields(cfg: dict, allowed: set[str]) -> None:
    extra = set(cfg) - allowed
    if extra:
        raise ValueError(f"unknown config fields: {sorted(extra)}")
