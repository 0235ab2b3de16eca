"""Command-line front end: run verification experiments from JSON configs.

``exchange-lattice run config.json`` validates the config against a schema,
runs the requested experiment, and writes deterministic result files plus a
``manifest.json`` into the output directory.  CSV files start with a comment
header carrying the tool version, a 12-hex-digit hash of the effective config,
and the seed; they end with a ``# footer`` comment holding summary values as
JSON.  Floats are written with ``repr``, so a rerun with the same config is
byte-identical (the manifest, which records wall time, is the one exception).

Exit codes: 0 success, 2 invalid config, 3 runtime failure.  Errors go to
stderr as one JSON object per line.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import jsonschema
import numpy as np

from . import __version__
from .kernels import (
    UnitRatioRate,
    kernel_from_config,
    minorization_ratio,
    rate_spec_from_config,
)
from .measures import (
    MicrocanonicalSpec,
    RatioLaw,
    detailed_balance_residual,
    flux_asymmetry_grid,
    stationarity_test,
)
from .simulate import Model, coupled_d2_ensemble
from .spectral import (
    ContractionMatrix,
    auto_horizon,
    d2_decay_rate_bound,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    fit_decay_rate,
    gap_scan,
    sub_seed,
)
from .state import EnergyState

__all__ = ["main"]


class _ConfigError(Exception):
    pass


_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_SIZE = {"type": "integer", "minimum": 2}
_HORIZON = {"anyOf": [_POSITIVE, {"const": "auto"}]}

_KERNEL_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["uniform", "beta", "point_half", "gg"]},
        "d": _POSITIVE,
    },
    "required": ["type"],
    "additionalProperties": False,
}

_RATE_SCHEMA = {
    "type": "object",
    "properties": {
        "type": {"enum": ["constant", "sqrt_cutoff", "sqrt"]},
        "lambda": _POSITIVE,
        "lambda_min": _POSITIVE,
    },
    "required": ["type"],
    "additionalProperties": False,
}

_MODEL_SCHEMA = {
    "type": "object",
    "properties": {"kernel": _KERNEL_SCHEMA, "rate": _RATE_SCHEMA},
    "required": ["kernel", "rate"],
    "additionalProperties": False,
}

_EXPERIMENTS = (
    "eigen",
    "minorization",
    "reversibility",
    "stationarity",
    "contraction",
    "gap_scan",
)

_TOP_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": list(_EXPERIMENTS)},
        "seed": {"type": "integer", "minimum": 0},
        "threads": {"type": "integer", "minimum": 1},
        "output_dir": {"type": "string", "minLength": 1},
        "model": _MODEL_SCHEMA,
        "params": {"type": "object"},
    },
    "required": ["experiment"],
    "additionalProperties": False,
}

_PARAM_SCHEMAS = {
    "eigen": {
        "type": "object",
        "properties": {"n_min": _SIZE, "n_max": _SIZE},
        "additionalProperties": False,
    },
    "minorization": {
        "type": "object",
        "properties": {"grid_size": {"type": "integer", "minimum": 100}},
        "additionalProperties": False,
    },
    "reversibility": {
        "type": "object",
        "properties": {
            "grid_size": {"type": "integer", "minimum": 2},
            "export_grid_size": {"type": "integer", "minimum": 2},
            "dim_d": _POSITIVE,
        },
        "additionalProperties": False,
    },
    "stationarity": {
        "type": "object",
        "properties": {
            "n_sites": _SIZE,
            "dim_d": _POSITIVE,
            "epsilon": _POSITIVE,
            "horizon": _HORIZON,
            "n_replicas": {"type": "integer", "minimum": 2},
        },
        "required": ["n_sites"],
        "additionalProperties": False,
    },
    "contraction": {
        "type": "object",
        "properties": {
            "n_sites": _SIZE,
            "epsilon": _POSITIVE,
            "horizon": _HORIZON,
            "n_replicas": {"type": "integer", "minimum": 2},
            "n_samples": {"type": "integer", "minimum": 2},
        },
        "required": ["n_sites"],
        "additionalProperties": False,
    },
    "gap_scan": {
        "type": "object",
        "properties": {
            "n_list": {"type": "array", "items": _SIZE, "minItems": 1},
            "dim_d": _POSITIVE,
            "epsilon": _POSITIVE,
            "n_replicas": {"type": "integer", "minimum": 2},
            "n_samples": {"type": "integer", "minimum": 2},
            "horizons": {
                "anyOf": [
                    {"type": "null"},
                    {"type": "array", "items": _POSITIVE, "minItems": 1},
                ]
            },
            "fit_window": {
                "type": "array",
                "items": _POSITIVE,
                "minItems": 2,
                "maxItems": 2,
            },
            "with_upper": {"type": "boolean"},
            "upper_draws": {"type": "integer", "minimum": 16},
            "alpha_draws": {"type": "integer", "minimum": 1},
            "trial_mode": {"type": "integer", "minimum": 1},
        },
        "required": ["n_list"],
        "additionalProperties": False,
    },
}

_PARAM_DEFAULTS = {
    "eigen": {"n_min": 2, "n_max": 64},
    "minorization": {"grid_size": 512},
    "reversibility": {"grid_size": 500, "export_grid_size": 128, "dim_d": 3.0},
    "stationarity": {
        "dim_d": 3.0,
        "epsilon": 1.0,
        "horizon": "auto",
        "n_replicas": 4096,
    },
    "contraction": {
        "epsilon": 1.0,
        "horizon": "auto",
        "n_replicas": 10000,
        "n_samples": 128,
    },
    "gap_scan": {
        "dim_d": 3.0,
        "epsilon": 1.0,
        "n_replicas": 1024,
        "n_samples": 256,
        "horizons": None,
        "fit_window": [0.05, 0.8],
        "with_upper": False,
        "upper_draws": 4096,
        "alpha_draws": 4,
        "trial_mode": 1,
    },
}

_NEEDS_MODEL = frozenset(_EXPERIMENTS) - {"eigen"}


def _json_safe(obj):
    """Replace non-finite floats by null so outputs stay valid JSON."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _config_hash(effective: dict) -> str:
    blob = json.dumps(effective, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


class _Run:
    """Resolved configuration plus output bookkeeping for one experiment."""

    def __init__(self, cfg: dict, args) -> None:
        self.experiment = cfg["experiment"]
        self.seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        self.threads = args.threads if args.threads is not None else cfg.get("threads", 1)
        self.output_dir = args.output_dir or cfg.get("output_dir", "out")
        self.params = {**_PARAM_DEFAULTS.get(self.experiment, {}), **cfg.get("params", {})}
        self.model: Model | None = None
        if "model" in cfg:
            kernel = kernel_from_config(cfg["model"]["kernel"])
            self.model = Model(kernel, rate_spec_from_config(cfg["model"]["rate"], kernel))
        elif self.experiment in _NEEDS_MODEL:
            raise _ConfigError(f"experiment {self.experiment!r} requires a model")
        self.config_hash = _config_hash(
            {
                "experiment": self.experiment,
                "model": cfg.get("model"),
                "params": self.params,
                "seed": self.seed,
            }
        )
        self.outputs: list[str] = []

    def header(self) -> str:
        return (
            f"# exchange-lattice v{__version__} experiment={self.experiment} "
            f"config_hash={self.config_hash} seed={self.seed}\n"
        )

    def meta(self) -> dict:
        return {
            "tool": "exchange-lattice",
            "version": __version__,
            "experiment": self.experiment,
            "config_hash": self.config_hash,
            "seed": self.seed,
        }

    def write_csv(self, name: str, columns: list[str], rows, footer: dict) -> None:
        path = os.path.join(self.output_dir, name)
        with open(path, "w") as fh:
            fh.write(self.header())
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
            blob = json.dumps(_json_safe(footer), sort_keys=True, separators=(",", ": "))
            fh.write(f"# footer {blob}\n")
        self.outputs.append(name)

    def write_json(self, name: str, payload: dict) -> None:
        path = os.path.join(self.output_dir, name)
        body = {"meta": self.meta(), **payload}
        with open(path, "w") as fh:
            fh.write(json.dumps(_json_safe(body), sort_keys=True, indent=2) + "\n")
        self.outputs.append(name)


def _semantic_checks(run: _Run) -> None:
    p = run.params
    if run.experiment == "eigen" and p["n_max"] < p["n_min"]:
        raise _ConfigError("n_max must be at least n_min")
    if run.experiment in ("minorization", "reversibility"):
        if not run.model.kernel.has_density:
            raise _ConfigError(
                f"kernel {run.model.kernel.name!r} has no density; "
                f"{run.experiment} needs one"
            )
    if run.experiment == "contraction":
        if not run.model.is_reference:
            raise _ConfigError(
                "contraction requires a constant rate and a ratio-independent kernel"
            )
        if run.model.kernel.variance() is None:
            raise _ConfigError("contraction requires a kernel with closed-form variance")
    if run.experiment == "gap_scan":
        lo, hi = p["fit_window"]
        if not 0.0 < lo < hi < 1.0:
            raise _ConfigError("fit_window must satisfy 0 < low < high < 1")
        if p["horizons"] is not None and len(p["horizons"]) != len(p["n_list"]):
            raise _ConfigError("horizons must match n_list in length")


def _run_eigen(run: _Run) -> None:
    p = run.params
    rows = []
    max_rel = 0.0
    for n in range(p["n_min"], p["n_max"] + 1):
        closed = eigenvalues_closed_form(n)
        numeric = eigenvalues_numeric(ContractionMatrix(n))
        rel = np.abs(numeric - closed) / closed
        max_rel = max(max_rel, float(rel.max()))
        for k in range(closed.size):
            rows.append((n, k + 1, closed[k], numeric[k], rel[k]))
    run.write_csv(
        "eigen.csv",
        ["n_sites", "k", "closed_form", "numeric", "rel_err"],
        rows,
        {"n_min": p["n_min"], "n_max": p["n_max"], "max_rel_err": max_rel},
    )


def _run_minorization(run: _Run) -> None:
    p = run.params
    value = minorization_ratio(run.model.kernel, p["grid_size"])
    run.write_json(
        "minorization.json",
        {
            "kernel": run.model.kernel.describe(),
            "grid_size": p["grid_size"],
            "inf_ratio": value,
            "reference_ratio_law": "beta(3/2, 3/2)",
        },
    )


def _run_reversibility(run: _Run) -> None:
    p = run.params
    kernel = run.model.kernel
    lambda_r = run.model.rates.lambda_r
    residual = detailed_balance_residual(kernel, lambda_r, p["grid_size"], p["dim_d"])
    run.write_json(
        "reversibility.json",
        {
            "kernel": kernel.describe(),
            "rate": run.model.rates.describe(),
            "dim_d": p["dim_d"],
            "grid_size": p["grid_size"],
            "residual": residual,
        },
    )
    betas, alphas, asym = flux_asymmetry_grid(
        kernel, lambda_r, p["export_grid_size"], p["dim_d"]
    )
    rows = [
        (betas[i], alphas[j], asym[i, j])
        for i in range(betas.size)
        for j in range(alphas.size)
    ]
    run.write_csv(
        "residual_grid.csv",
        ["beta", "alpha", "asymmetry"],
        rows,
        {
            "dim_d": p["dim_d"],
            "grid_size": p["export_grid_size"],
            "residual": float(asym.max()),
        },
    )


def _run_stationarity(run: _Run) -> None:
    p = run.params
    spec = MicrocanonicalSpec(dim_d=p["dim_d"], epsilon=p["epsilon"], n_sites=p["n_sites"])
    horizon = p["horizon"]
    if horizon == "auto":
        horizon = auto_horizon(run.model, spec)
    report = stationarity_test(
        run.model, spec, horizon, p["n_replicas"], run.seed, threads=run.threads
    )
    run.write_json("stationarity.json", report.to_dict())
    lambda_r = run.model.rates.lambda_r
    law = RatioLaw(
        dim_d=p["dim_d"],
        scale_eps=p["epsilon"],
        lambda_r=None if isinstance(lambda_r, UnitRatioRate) else lambda_r,
    )
    rows = [
        (i, report.final_site[i], report.final_ratio[i])
        for i in range(report.final_site.size)
    ]
    run.write_csv(
        "samples.csv",
        ["replica", "site_1", "ratio_1"],
        rows,
        {
            "dim_d": p["dim_d"],
            "epsilon": p["epsilon"],
            "n_sites": p["n_sites"],
            "horizon": horizon,
            "n_replicas": p["n_replicas"],
            "p_normalizer": law.normalizer,
            "pass": report.passed,
        },
    )


def _run_contraction(run: _Run) -> None:
    p = run.params
    n = p["n_sites"]
    eps = p["epsilon"]
    lam = run.model.rates.constant_value
    sigma_sq = run.model.kernel.variance()
    bound = d2_decay_rate_bound(lam, sigma_sq, n)
    horizon = p["horizon"]
    if horizon == "auto":
        if bound <= 0.0:
            raise _ConfigError("rate bound is zero; pass an explicit horizon")
        horizon = math.log(100.0) / bound
    # Opposite-corner pair: it attains the diameter of the energy simplex.
    x0 = np.zeros(n)
    x0[0] = n * eps
    y0 = np.zeros(n)
    y0[-1] = n * eps
    times, d2, _ = coupled_d2_ensemble(
        EnergyState(x0),
        EnergyState(y0),
        run.model,
        horizon,
        p["n_samples"],
        p["n_replicas"],
        run.seed,
        threads=run.threads,
    )
    fit = fit_decay_rate(times, d2, boot_seed=sub_seed(run.seed, 0xF17))
    rows = list(zip(times, fit.mean, fit.se))
    run.write_csv(
        "contraction.csv",
        ["time", "mean_d2", "stderr_d2"],
        rows,
        {
            "n_sites": n,
            "epsilon": eps,
            "lambda": lam,
            "sigma_sq": sigma_sq,
            "n_replicas": p["n_replicas"],
            "initial_d2": float(d2[0, 0]),
            "fitted_rate": fit.rate,
            "fitted_stderr": fit.stderr,
            "bound_rate": bound,
            "w2_bound_rate": bound / 2.0,
        },
    )


def _run_gap_scan(run: _Run) -> None:
    p = run.params
    result = gap_scan(
        run.model,
        p["n_list"],
        dim_d=p["dim_d"],
        epsilon=p["epsilon"],
        n_replicas=p["n_replicas"],
        n_samples=p["n_samples"],
        horizons=p["horizons"],
        seed=run.seed,
        threads=run.threads,
        fit_window=tuple(p["fit_window"]),
        with_upper=p["with_upper"],
        upper_draws=p["upper_draws"],
        alpha_draws=p["alpha_draws"],
        trial_mode=p["trial_mode"],
    )
    rows = [
        (
            r.n_sites,
            r.horizon,
            r.bound_lower,
            r.gap_est,
            r.gap_stderr,
            r.bound_upper,
            r.flag,
        )
        for r in result.rows
    ]
    run.write_csv(
        "gap_scan.csv",
        ["n_sites", "horizon", "bound_lower", "gap_est", "gap_stderr", "bound_upper", "flag"],
        rows,
        {
            "model": result.model,
            "slope": result.slope,
            "slope_stderr": result.slope_stderr,
            "slope_ci": list(result.slope_ci),
            "trial_mode": p["trial_mode"],
        },
    )


_RUNNERS = {
    "eigen": _run_eigen,
    "minorization": _run_minorization,
    "reversibility": _run_reversibility,
    "stationarity": _run_stationarity,
    "contraction": _run_contraction,
    "gap_scan": _run_gap_scan,
}


def _error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def _cmd_list_models() -> int:
    listing = {
        "experiments": list(_EXPERIMENTS),
        "kernels": [
            {"type": "uniform", "fields": []},
            {"type": "beta", "fields": ["d"]},
            {"type": "point_half", "fields": []},
            {"type": "gg", "fields": []},
        ],
        "rates": [
            {"type": "constant", "fields": ["lambda"]},
            {"type": "sqrt_cutoff", "fields": ["lambda_min"]},
            {"type": "sqrt", "fields": []},
        ],
    }
    print(json.dumps(listing, indent=2))
    return 0


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        _error("config", f"cannot read config: {exc}")
        return 2
    except json.JSONDecodeError as exc:
        _error("config", f"config is not valid JSON: {exc}")
        return 2
    try:
        jsonschema.validate(cfg, _TOP_SCHEMA, cls=jsonschema.Draft202012Validator)
        jsonschema.validate(
            cfg.get("params", {}),
            _PARAM_SCHEMAS[cfg["experiment"]],
            cls=jsonschema.Draft202012Validator,
        )
    except jsonschema.ValidationError as exc:
        where = "/".join(str(part) for part in exc.absolute_path) or "top level"
        _error("config", f"{exc.message} (at {where})")
        return 2
    try:
        run = _Run(cfg, args)
        _semantic_checks(run)
        os.makedirs(run.output_dir, exist_ok=True)
    except (_ConfigError, ValueError, OSError) as exc:
        _error("config", str(exc))
        return 2
    started = time.perf_counter()
    try:
        _RUNNERS[run.experiment](run)
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports, not raises
        _error("runtime", f"{type(exc).__name__}: {exc}")
        return 3
    manifest = {
        **run.meta(),
        "threads": run.threads,
        "elapsed_s": time.perf_counter() - started,
        "outputs": run.outputs,
    }
    path = os.path.join(run.output_dir, "manifest.json")
    with open(path, "w") as fh:
        fh.write(json.dumps(_json_safe(manifest), sort_keys=True, indent=2) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exchange-lattice",
        description="Verification experiments for the energy-exchange chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment from a JSON config")
    runp.add_argument("config", help="path to the JSON config file")
    runp.add_argument("--output-dir", default=None, help="override the output directory")
    runp.add_argument("--seed", type=int, default=None, help="override the seed")
    runp.add_argument("--threads", type=int, default=None, help="override the thread count")
    sub.add_parser("list-models", help="list experiments, kernels, and rate types")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "list-models":
        return _cmd_list_models()
    return _cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
