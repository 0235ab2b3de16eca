"""Simulation and verification toolkit for a chain of energy-exchanging sites.

A line of sites holds nonnegative energies.  Each bond carries an exponential
clock whose rate depends on the two energies it joins; when it rings, the pair
energy is redistributed by a draw from a splitting kernel.  The package
simulates this jump process exactly, carries the closed-form equilibrium laws
and spectral bounds that go with it, and ships estimators plus a CLI for
checking the two against each other.
"""

__version__ = "0.1.0"

from .kernels import (
    GG_ENVELOPE,
    GG_LAMBDA_R_MAX,
    GG_LAMBDA_R_MIN,
    GG_MINORIZATION,
    AlphaKernel,
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
from .measures import (
    CheckResult,
    GammaProductSpec,
    MicrocanonicalSpec,
    RatioLaw,
    StationarityReport,
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
from .simulate import (
    CoupledTrajectory,
    EnsemblePaths,
    JumpEvent,
    Model,
    Observable,
    ObservableTable,
    Trajectory,
    bond_ratio,
    coupled_d2_ensemble,
    ensemble_paths,
    event_log_csv,
    fourier_mode,
    record_observables,
    run_embedded,
    simulate_coupled,
    simulate_ct,
    site_energy,
    step_embedded,
    total_energy,
    trajectory_samples_csv,
    u_coordinate,
)
from .spectral import (
    ComparisonInputs,
    ContractionMatrix,
    DecayFit,
    GapEstimate,
    GapScanResult,
    GapScanRow,
    auto_horizon,
    closed_form_lower_bound,
    composite_gap_bound,
    contraction_rate_bound,
    d2_decay_rate_bound,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    estimate_gap_autocorr,
    fit_decay_rate,
    gap_from_paths,
    gap_scan,
    gg_comparison_inputs,
    rayleigh_quotient_upper,
    scaling_slope,
    sub_seed,
)
from .state import (
    EnergyState,
    ExchangeMove,
    UCoords,
    apply_exchange,
    diameter_bound,
    from_u,
    metric,
    split_pair_sum,
    to_u,
)

__all__ = [name for name in dir() if not name.startswith("_")]
