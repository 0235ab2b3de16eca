"""Spectral quantities: contraction matrix, rate bounds, gap estimators.

Under the shared-draw coupling the difference ``w`` of the two u-coordinate
vectors contracts in the mean at a rate controlled by the quadratic form
``w^T M w`` with ``M`` the (N-1)-dimensional matrix with 2 on the diagonal and
-1 two steps off it.  Permuting odd and even positions splits ``M`` into two
second-difference blocks, so its spectrum is known in closed form; the numeric
route here re-derives it by Sturm-sequence bisection without calling any
library eigensolver, which keeps the cross-check meaningful.

The spectral-gap estimators work on replica ensembles: a time-origin-averaged
autocorrelation fit for the gap itself, and a Monte Carlo Rayleigh quotient
for a variational upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kernels import GG_MINORIZATION, GaspardGilbertKernel
from .measures import MicrocanonicalSpec, microcanonical_array, microcanonical_sampler
from .simulate import Model, Observable, ensemble_paths, fourier_mode

__all__ = [
    "ContractionMatrix",
    "eigenvalues_closed_form",
    "eigenvalues_numeric",
    "contraction_rate_bound",
    "d2_decay_rate_bound",
    "ComparisonInputs",
    "composite_gap_bound",
    "gg_comparison_inputs",
    "closed_form_lower_bound",
    "GapEstimate",
    "gap_from_paths",
    "estimate_gap_autocorr",
    "rayleigh_quotient_upper",
    "DecayFit",
    "fit_decay_rate",
    "auto_horizon",
    "GapScanRow",
    "GapScanResult",
    "gap_scan",
    "scaling_slope",
    "sub_seed",
]


@dataclass(frozen=True)
class ContractionMatrix:
    """Quadratic-form matrix of the coupled difference for ``n_sites`` sites."""

    n_sites: int

    def __post_init__(self) -> None:
        if self.n_sites < 2:
            raise ValueError("need at least two sites")

    @property
    def size(self) -> int:
        return self.n_sites - 1

    def dense(self) -> np.ndarray:
        m = self.size
        return 2.0 * np.eye(m) - np.eye(m, k=2) - np.eye(m, k=-2)

    def block_sizes(self) -> tuple[int, int]:
        """Sizes of the odd- and even-position second-difference blocks."""
        m = self.size
        return (m + 1) // 2, m // 2


def eigenvalues_closed_form(n_sites: int) -> np.ndarray:
    """Spectrum of the contraction matrix, ascending.

    Each position-parity block is a second-difference matrix; a block of size
    ``m`` contributes ``4 sin^2(pi k / (2(m+1)))`` for ``k = 1..m``.  For odd
    ``n_sites`` the blocks coincide and every value appears twice.
    """
    mat = ContractionMatrix(n_sites)
    vals = [
        4.0 * np.sin(np.pi * np.arange(1, m + 1) / (2.0 * (m + 1))) ** 2
        for m in mat.block_sizes()
        if m > 0
    ]
    return np.sort(np.concatenate(vals))


def _sturm_count(x: np.ndarray, m: int) -> np.ndarray:
    """Eigenvalues of the size-``m`` second-difference block at or below ``x``.

    Counts negative pivots of the Sturm factorization of tridiag(-1, 2, -1).
    A vanishing pivot means ``x`` is an eigenvalue of a leading submatrix; the
    usual remedy is to treat it as a tiny negative, which both keeps the
    recurrence finite and keeps the count monotone in ``x``.
    """
    tiny = 1e-150
    d = 2.0 - x
    d = np.where(np.abs(d) < tiny, -tiny, d)
    count = (d < 0.0).astype(np.int64)
    for _ in range(m - 1):
        d = 2.0 - x - 1.0 / d
        d = np.where(np.abs(d) < tiny, -tiny, d)
        count += d < 0.0
    return count


def _tridiag_eigenvalues(m: int, n_bisect: int = 60) -> np.ndarray:
    """All eigenvalues of the size-``m`` block by bisection, ascending.

    All ``m`` targets are bisected in lockstep: one Sturm evaluation per
    iteration serves every index.
    """
    if m == 0:
        return np.empty(0)
    k = np.arange(1, m + 1)
    lo = np.zeros(m)
    hi = np.full(m, 4.0)
    for _ in range(n_bisect):
        mid = 0.5 * (lo + hi)
        above = _sturm_count(mid, m) >= k
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def eigenvalues_numeric(matrix: ContractionMatrix) -> np.ndarray:
    """Spectrum by per-block Sturm bisection, ascending; no library solver."""
    m1, m2 = matrix.block_sizes()
    return np.sort(np.concatenate([_tridiag_eigenvalues(m1), _tridiag_eigenvalues(m2)]))


def contraction_rate_bound(lam: float, sigma_sq: float, n_sites: int) -> float:
    """Lower bound on the coupling contraction rate of the mean distance.

    ``lam`` is the constant bond rate, ``sigma_sq`` the kernel variance (the
    kernel must have mean one half).  The squared distance loses at least
    ``lam (1/2 - 2 sigma_sq) w^T M w`` per unit time, and ``M`` is bounded
    below by ``4 sin^2(pi / (n_sites + 2))`` for either parity, which gives
    this rate for the distance itself (half the squared-distance rate).
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValueError("rate must be positive and finite")
    if not 0.0 <= sigma_sq <= 0.25:
        raise ValueError("kernel variance must lie in [0, 1/4]")
    if n_sites < 2:
        raise ValueError("need at least two sites")
    return 0.5 * lam * (1.0 - 4.0 * sigma_sq) * math.sin(math.pi / (n_sites + 2)) ** 2


def d2_decay_rate_bound(lam: float, sigma_sq: float, n_sites: int) -> float:
    """Lower bound on the exponential decay rate of the mean squared distance."""
    return 2.0 * contraction_rate_bound(lam, sigma_sq, n_sites)


@dataclass(frozen=True)
class ComparisonInputs:
    """Constants feeding the gap bound for non-reference models.

    ``b_min``: mass the kernel keeps above the symmetric Beta ratio law;
    ``c_minus``/``c_plus``: bounds on the rate tilt of the stationary ratio
    law; ``lambda_star``: uniform lower bound on the bond rate;
    ``sigma_star_sq``: variance of the comparison kernel.
    """

    b_min: float
    c_minus: float
    c_plus: float
    lambda_star: float
    sigma_star_sq: float

    def __post_init__(self) -> None:
        if not 0.0 < self.b_min <= 1.0:
            raise ValueError("b_min must lie in (0, 1]")
        if not (0.0 < self.c_minus <= self.c_plus and math.isfinite(self.c_plus)):
            raise ValueError("need 0 < c_minus <= c_plus < inf")
        if not (self.lambda_star > 0.0 and math.isfinite(self.lambda_star)):
            raise ValueError("lambda_star must be positive and finite")
        if not 0.0 <= self.sigma_star_sq <= 0.25:
            raise ValueError("sigma_star_sq must lie in [0, 1/4]")


def composite_gap_bound(inputs: ComparisonInputs, n_sites: int) -> float:
    """Gap bound assembled from comparison constants.

    With neutral inputs (b_min = 1, c_minus = c_plus) this reproduces
    ``contraction_rate_bound(lambda_star, sigma_star_sq, n_sites)`` exactly.
    """
    base = contraction_rate_bound(inputs.lambda_star, inputs.sigma_star_sq, n_sites)
    return inputs.b_min * (inputs.c_minus / inputs.c_plus) * base


def gg_comparison_inputs(lambda_min: float) -> ComparisonInputs:
    """Comparison constants of the hard-ball pair kernel with a rate floor.

    The kernel density dominates ``pi/4`` times the d = 3 ratio law, the rate
    tilt is already split off (so both tilt constants are 1), the bond rate is
    at least ``lambda_min`` times the smallest ratio factor, and the matching
    comparison kernel is the symmetric Beta with variance 1/16.
    """
    if not (lambda_min > 0.0 and math.isfinite(lambda_min)):
        raise ValueError("lambda_min must be positive and finite")
    return ComparisonInputs(
        b_min=GG_MINORIZATION,
        c_minus=1.0,
        c_plus=1.0,
        lambda_star=lambda_min * math.sqrt(math.pi) / 3.0,
        sigma_star_sq=1.0 / 16.0,
    )


def closed_form_lower_bound(model: Model, n_sites: int) -> float:
    """Best closed-form gap lower bound for ``model``, or NaN if none applies."""
    if model.is_reference:
        sigma_sq = model.kernel.variance()
        if sigma_sq is not None:
            return contraction_rate_bound(model.rates.constant_value, sigma_sq, n_sites)
        return math.nan
    if isinstance(model.kernel, GaspardGilbertKernel) and model.rates.floor > 0.0:
        inputs = ComparisonInputs(
            b_min=GG_MINORIZATION,
            c_minus=1.0,
            c_plus=1.0,
            lambda_star=model.rates.floor,
            sigma_star_sq=1.0 / 16.0,
        )
        return composite_gap_bound(inputs, n_sites)
    return math.nan


# --- gap estimation -----------------------------------------------------------


@dataclass(frozen=True)
class GapEstimate:
    value: float
    stderr: float
    method: str
    model: str
    n_sites: int
    flag: str | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "method": self.method,
            "model": self.model,
            "n_sites": self.n_sites,
            "flag": self.flag,
        }


def sub_seed(seed: int, *tags: int) -> int:
    """Deterministic derived seed, independent of the block substreams."""
    ss = np.random.SeedSequence([int(seed)] + [int(t) for t in tags])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _wls_line(x: np.ndarray, y: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    """Weighted least-squares line fit: slope, intercept, slope variance."""
    sw = w.sum()
    xb = float((w * x).sum() / sw)
    yb = float((w * y).sum() / sw)
    sxx = float((w * (x - xb) ** 2).sum())
    if sxx <= 0.0:
        raise ValueError("degenerate abscissae in the fit")
    slope = float((w * (x - xb) * (y - yb)).sum() / sxx)
    return slope, yb - slope * xb, 1.0 / sxx


def _autocov_rows(f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-replica lagged products E[f_0 f_l] and per-replica time means.

    FFT evaluates every lag at once; dividing by the pair count per lag makes
    each row an unbiased lagged-moment estimate under time-origin averaging.
    """
    n_rep, m = f.shape
    size = 1 << (2 * m - 1).bit_length()
    fhat = np.fft.rfft(f, n=size, axis=1)
    raw = np.fft.irfft(fhat * np.conj(fhat), n=size, axis=1)[:, :m]
    return raw / (m - np.arange(m)), f.mean(axis=1)


def _select_lags(rho: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    """Lags whose autocorrelation sits inside the fit window.

    Truncated at the first dip below the window floor so the noisy tail, which
    can wander back above the floor, never enters the fit.
    """
    lo, hi = window
    below = np.nonzero(rho[1:] < lo)[0]
    last = below[0] + 1 if below.size else rho.size
    lags = np.arange(1, last)
    return lags[(rho[lags] >= lo) & (rho[lags] <= hi)]


def gap_from_paths(
    times: np.ndarray,
    f: np.ndarray,
    fit_window: tuple[float, float] = (0.05, 0.8),
    n_boot: int = 200,
    boot_seed: int = 0,
    method: str = "autocorrelation",
    model: str = "",
    n_sites: int = 0,
) -> GapEstimate:
    """Gap estimate from stationary observable paths, one row per replica.

    The time-origin-averaged autocorrelation is fit log-linearly over the lag
    window, weighted by the squared autocorrelation (the delta-method weight
    for the log).  The spread of the fit over replica bootstrap resamples
    gives the standard error.  Degenerate inputs are flagged, not raised.
    """
    if f.ndim != 2 or f.shape[0] < 2:
        raise ValueError("need a (replicas, samples) array with at least two rows")
    raw, mu = _autocov_rows(f)
    mean_sq = float(mu.mean()) ** 2
    cov = raw.mean(axis=0) - mean_sq
    base = GapEstimate(math.nan, math.nan, method, model, n_sites)
    if not cov[0] > 0.0 or cov[0] <= 1e-12 * mean_sq:
        return replace(base, flag="degenerate_zero_variance")
    rho = cov / cov[0]
    lags = _select_lags(rho, fit_window)
    if lags.size < 3:
        return replace(base, flag="too_few_lags_in_window")
    t = times[lags]
    slope, _, _ = _wls_line(t, np.log(rho[lags]), rho[lags] ** 2)
    value = -slope

    rng = np.random.default_rng(np.random.SeedSequence([boot_seed, 0xB0]))
    n_rep = f.shape[0]
    rates = []
    for _ in range(n_boot):
        idx = rng.integers(0, n_rep, size=n_rep)
        cov_b = raw[idx].mean(axis=0) - float(mu[idx].mean()) ** 2
        if not cov_b[0] > 0.0:
            continue
        rho_b = cov_b[lags] / cov_b[0]
        keep = rho_b > 0.0
        if keep.sum() < 2:
            continue
        slope_b, _, _ = _wls_line(t[keep], np.log(rho_b[keep]), rho_b[keep] ** 2)
        rates.append(-slope_b)
    if len(rates) < max(10, n_boot // 4):
        return replace(base, value=value, flag="bootstrap_failed")
    stderr = float(np.std(rates, ddof=1))
    flag = "noisy" if stderr > abs(value) else None
    return GapEstimate(value, stderr, method, model, n_sites, flag)


def estimate_gap_autocorr(
    model: Model,
    spec: MicrocanonicalSpec,
    observable: Observable,
    horizon: float,
    n_replicas: int,
    seed: int,
    n_samples: int = 256,
    fit_window: tuple[float, float] = (0.05, 0.8),
    n_boot: int = 200,
    threads: int = 1,
) -> GapEstimate:
    """Spectral-gap estimate from the stationary autocorrelation decay.

    Replicas start from the equilibrium law, so every time origin is
    stationary and the whole path feeds the autocorrelation.
    """
    paths = ensemble_paths(
        model,
        microcanonical_sampler(spec),
        [observable],
        horizon,
        n_samples=n_samples,
        n_replicas=n_replicas,
        seed=seed,
        threads=threads,
    )
    return gap_from_paths(
        paths.times,
        paths.values[:, :, 0],
        fit_window=fit_window,
        n_boot=n_boot,
        boot_seed=sub_seed(seed, 0xB001),
        model=model.describe(),
        n_sites=spec.n_sites,
    )


def rayleigh_quotient_upper(
    model: Model,
    spec: MicrocanonicalSpec,
    observable: Observable,
    n_draws: int = 4096,
    alpha_draws: int = 4,
    seed: int = 0,
    n_boot: int = 200,
) -> GapEstimate:
    """Variational upper bound on the gap: Dirichlet form over variance.

    Both are Monte Carlo averages over equilibrium draws; the inner average
    over kernel draws sits inside the Dirichlet form, so the ratio is an
    upper-bound estimate for any square-integrable trial observable.
    Raises for an (almost) constant trial observable.
    """
    if n_draws < 16:
        raise ValueError("need at least 16 equilibrium draws")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x0A]))
    x = microcanonical_array(spec, n_draws, rng)
    fx = observable(x)
    var = float(np.var(fx, ddof=1))
    scale = float(np.max(np.abs(fx))) + 1.0
    if var <= 1e-18 * scale**2:
        raise ValueError("trial observable is constant on the energy shell")
    n = spec.n_sites
    acc = np.zeros(n_draws)
    for i in range(n - 1):
        left, right = x[:, i], x[:, i + 1]
        lam = np.broadcast_to(
            np.asarray(model.rates.bond_rates(left, right), dtype=np.float64), (n_draws,)
        )
        s = left + right
        pos = s > 0.0
        beta = np.where(pos, left / np.where(pos, s, 1.0), 0.5)
        for _ in range(alpha_draws):
            a = np.atleast_1d(model.kernel.sample(beta, rng))
            x2 = x.copy()
            big = np.maximum(a, 1.0 - a) * s
            small = s - big
            x2[:, i] = np.where(a >= 0.5, big, small)
            x2[:, i + 1] = np.where(a >= 0.5, small, big)
            diff = observable(x2) - fx
            acc += lam * diff * diff
    acc *= 0.5 / alpha_draws
    value = float(acc.mean()) / var

    idx = np.random.default_rng(np.random.SeedSequence([seed, 0x0B])).integers(
        0, n_draws, size=(n_boot, n_draws)
    )
    num = acc[idx].mean(axis=1)
    den = fx[idx].var(axis=1, ddof=1)
    good = den > 0.0
    stderr = float(np.std(num[good] / den[good], ddof=1))
    return GapEstimate(
        value, stderr, "rayleigh_upper", model.describe(), spec.n_sites
    )


# --- decay-curve fitting --------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    """Exponential decay rate of a mean curve, with replica-bootstrap stderr."""

    rate: float
    stderr: float
    times: np.ndarray
    mean: np.ndarray
    se: np.ndarray
    n_fit: int


def fit_decay_rate(
    times: np.ndarray, rows: np.ndarray, n_boot: int = 200, boot_seed: int = 0
) -> DecayFit:
    """Log-linear fit of the replica-mean curve of ``rows`` against time.

    Weighted by the squared mean-to-stderr ratio of each sample, the
    delta-method weight of the log.  Samples with nonpositive mean or zero
    spread (the shared initial point) stay out of the fit.
    """
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError("need a (replicas, samples) array with at least two rows")
    n_rep = rows.shape[0]
    mean = rows.mean(axis=0)
    se = rows.std(axis=0, ddof=1) / math.sqrt(n_rep)
    sel = np.nonzero((mean > 0.0) & (se > 0.0))[0]
    if sel.size < 3:
        raise ValueError("too few positive samples to fit a decay rate")
    w = (mean[sel] / se[sel]) ** 2
    slope, _, _ = _wls_line(times[sel], np.log(mean[sel]), w)

    rng = np.random.default_rng(np.random.SeedSequence([boot_seed, 0xDECA]))
    rates = []
    for _ in range(n_boot):
        idx = rng.integers(0, n_rep, size=n_rep)
        mean_b = rows[idx].mean(axis=0)
        se_b = rows[idx].std(axis=0, ddof=1) / math.sqrt(n_rep)
        ok = sel[(mean_b[sel] > 0.0) & (se_b[sel] > 0.0)]
        if ok.size < 3:
            continue
        slope_b, _, _ = _wls_line(
            times[ok], np.log(mean_b[ok]), (mean_b[ok] / se_b[ok]) ** 2
        )
        rates.append(-slope_b)
    stderr = float(np.std(rates, ddof=1)) if len(rates) > 1 else math.nan
    return DecayFit(
        rate=-slope, stderr=stderr, times=times, mean=mean, se=se, n_fit=int(sel.size)
    )


def auto_horizon(model: Model, spec: MicrocanonicalSpec, depth: float = 3.7) -> float:
    """Pilot horizon: ``depth`` e-foldings of the slowest linear mode.

    The mode rate is approximated by ``2 mean-bond-rate sin^2(pi / 2N)`` with
    the mean bond rate taken over equilibrium draws (a fixed internal stream,
    so the horizon does not shift with the user seed).  ``depth`` 3.7 parks
    the default fit window comfortably inside the sampled range.
    """
    if depth <= 0.0:
        raise ValueError("depth must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([1789, spec.n_sites]))
    x = microcanonical_array(spec, 2048, rng)
    lam_bar = float(np.mean(np.asarray(model.rates.bond_rates(x[:, :-1], x[:, 1:]))))
    if lam_bar <= 0.0:
        raise ValueError("mean bond rate vanished; cannot pick a horizon")
    rate_guess = 2.0 * lam_bar * math.sin(math.pi / (2.0 * spec.n_sites)) ** 2
    return depth / rate_guess


# --- gap scaling over system size ------------------------------------------------


@dataclass(frozen=True)
class GapScanRow:
    n_sites: int
    horizon: float
    bound_lower: float
    gap_est: float
    gap_stderr: float
    bound_upper: float
    flag: str | None

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "horizon": self.horizon,
            "bound_lower": self.bound_lower,
            "gap_est": self.gap_est,
            "gap_stderr": self.gap_stderr,
            "bound_upper": self.bound_upper,
            "flag": self.flag,
        }


@dataclass(frozen=True)
class GapScanResult:
    model: str
    rows: tuple[GapScanRow, ...]
    slope: float
    slope_stderr: float
    slope_ci: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "rows": [r.to_dict() for r in self.rows],
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "slope_ci": list(self.slope_ci),
        }


def scaling_slope(
    n_sites: np.ndarray, gap: np.ndarray, stderr: np.ndarray
) -> tuple[float, float, tuple[float, float]]:
    """Log-log slope of gap against system size, with a 95% interval.

    Weights are inverse variances of ``log gap`` by the delta method.
    """
    n_sites = np.asarray(n_sites, dtype=np.float64)
    gap = np.asarray(gap, dtype=np.float64)
    stderr = np.asarray(stderr, dtype=np.float64)
    ok = np.isfinite(gap) & (gap > 0.0) & np.isfinite(stderr) & (stderr > 0.0)
    if ok.sum() < 2:
        raise ValueError("need at least two usable gap estimates")
    w = (gap[ok] / stderr[ok]) ** 2
    slope, _, var = _wls_line(np.log(n_sites[ok]), np.log(gap[ok]), w)
    half = 1.96 * math.sqrt(var)
    return slope, math.sqrt(var), (slope - half, slope + half)


def gap_scan(
    model: Model,
    n_list,
    dim_d: float = 3.0,
    epsilon: float = 1.0,
    n_replicas: int = 1024,
    n_samples: int = 256,
    horizons=None,
    seed: int = 0,
    threads: int = 1,
    fit_window: tuple[float, float] = (0.05, 0.8),
    n_boot: int = 200,
    with_upper: bool = False,
    upper_draws: int = 4096,
    alpha_draws: int = 4,
    trial_mode: int = 1,
) -> GapScanResult:
    """Estimate the gap over a list of sizes and fit its scaling law.

    The trial observable is the ``trial_mode``-th cosine mode.  Horizons
    default to ``auto_horizon`` per size; pass a matching list to override.
    Each size gets its own derived seed, so scans are reproducible and sizes
    are mutually independent.
    """
    n_list = [int(v) for v in n_list]
    if len(n_list) < 1:
        raise ValueError("need at least one size")
    if horizons is not None and len(horizons) != len(n_list):
        raise ValueError("horizons must match n_list")
    rows = []
    for j, n in enumerate(n_list):
        spec = MicrocanonicalSpec(dim_d=dim_d, epsilon=epsilon, n_sites=n)
        horizon = float(horizons[j]) if horizons is not None else auto_horizon(model, spec)
        est = estimate_gap_autocorr(
            model,
            spec,
            fourier_mode(trial_mode, n),
            horizon,
            n_replicas,
            seed=sub_seed(seed, n),
            n_samples=n_samples,
            fit_window=fit_window,
            n_boot=n_boot,
            threads=threads,
        )
        upper = math.nan
        if with_upper:
            upper = rayleigh_quotient_upper(
                model,
                spec,
                fourier_mode(trial_mode, n),
                n_draws=upper_draws,
                alpha_draws=alpha_draws,
                seed=sub_seed(seed, n, 1),
            ).value
        rows.append(
            GapScanRow(
                n_sites=n,
                horizon=horizon,
                bound_lower=closed_form_lower_bound(model, n),
                gap_est=est.value,
                gap_stderr=est.stderr,
                bound_upper=upper,
                flag=est.flag,
            )
        )
    ns = np.array([r.n_sites for r in rows], dtype=np.float64)
    gaps = np.array([r.gap_est for r in rows])
    errs = np.array([r.gap_stderr for r in rows])
    if len(rows) >= 2 and np.sum(np.isfinite(gaps) & (gaps > 0)) >= 2:
        slope, slope_se, ci = scaling_slope(ns, gaps, errs)
    else:
        slope, slope_se, ci = math.nan, math.nan, (math.nan, math.nan)
    return GapScanResult(
        model=model.describe(),
        rows=tuple(rows),
        slope=slope,
        slope_stderr=slope_se,
        slope_ci=ci,
    )
