"""The four standard figure kinds.

Every renderer draws the raw table columns and overlays curves rebuilt from
the footer metadata: exponential envelopes at the stored contraction rates,
the power-law reference and fitted slope for the gap scan, the closed-form
stationary densities for the ratio histogram, and the flux-asymmetry scale
for the reversibility grid.  Rendering is read-only and deterministic: the
same inputs produce byte-identical image files.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import SchemaError, Table, read_table

FIGURE_KINDS = ("decay", "scaling", "density", "heatmap")

_FORMATS = (".png", ".svg")

# frozen rendering parameters so output bytes do not depend on ambient state
_RC = {
    "figure.autolayout": True,
    "svg.fonttype": "none",
    "svg.hashsalt": "exchange-lattice-plots",
    "axes.grid": True,
    "grid.alpha": 0.3,
    "legend.fontsize": 9,
}

_DEFAULT_OPTIONS = {
    "title": None,
    "xlabel": None,
    "ylabel": None,
    "dpi": 144,
    "bins": 48,
    "grid": True,
    "figsize": (6.4, 4.8),
}


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: a table file, a kind, and an output path."""

    kind: str
    input: str
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind '{self.kind}'")
        if not self.output.endswith(_FORMATS):
            raise ValueError("output must end in .png or .svg")
        unknown = set(self.options) - set(_DEFAULT_OPTIONS)
        if unknown:
            raise ValueError(f"unknown options: {sorted(unknown)}")

    def option(self, name: str):
        return self.options.get(name, _DEFAULT_OPTIONS[name])


def _beta_density(b: np.ndarray, dim_d: float) -> np.ndarray:
    """Symmetric Beta(d/2, d/2) density; d=3 gives (8/pi) sqrt(b(1-b))."""
    const = math.exp(math.lgamma(dim_d) - 2.0 * math.lgamma(dim_d / 2.0))
    with np.errstate(divide="ignore"):
        return const * np.power(b * (1.0 - b), dim_d / 2.0 - 1.0)


def _gg_lambda_r(b: np.ndarray) -> np.ndarray:
    """Ratio-dependent rate factor of the billiard-derived kernel."""
    big = np.maximum(b, 1.0 - b)
    return (math.sqrt(2.0 * math.pi) / 6.0) * (0.5 + big) / np.sqrt(big)


def _style_axes(ax, spec: FigureSpec, xlabel: str, ylabel: str, title: str) -> None:
    ax.set_xlabel(spec.option("xlabel") or xlabel)
    ax.set_ylabel(spec.option("ylabel") or ylabel)
    ax.set_title(spec.option("title") or title)
    ax.grid(spec.option("grid"))


def _render_decay(table: Table, spec: FigureSpec, ax) -> None:
    table.require("time", "mean_d2", "stderr_d2")
    t = table.column("time")
    mean = table.column("mean_d2")
    se = table.column("stderr_d2")
    d0 = float(table.footer_value("initial_d2"))
    bound = float(table.footer_value("bound_rate"))
    w2 = float(table.footer_value("w2_bound_rate"))
    rate = float(table.footer_value("fitted_rate"))
    stderr = float(table.footer_value("fitted_stderr"))

    lo = np.maximum(mean - 2.0 * se, np.min(mean[mean > 0.0], initial=d0) * 1e-3)
    ax.fill_between(t, lo, mean + 2.0 * se, alpha=0.25, linewidth=0, label="+-2 se")
    ax.semilogy(t, mean, lw=1.5, label="mean d^2")
    ax.semilogy(t, d0 * np.exp(-bound * t), "k--", lw=1.2, label=f"bound rate {bound:.4g}")
    ax.semilogy(t, d0 * np.exp(-w2 * t), "k:", lw=1.0, label=f"metric bound rate {w2:.4g}")
    ax.semilogy(
        t, d0 * np.exp(-rate * t), "-.", lw=1.0,
        label=f"fitted rate {rate:.4g} +- {stderr:.2g}",
    )
    ax.legend()
    n = table.footer_value("n_sites")
    _style_axes(ax, spec, "time", "mean squared distance", f"coupled pair decay, N={n}")


def _render_scaling(table: Table, spec: FigureSpec, ax) -> None:
    table.require("n_sites", "gap_est", "gap_stderr", "bound_lower", "bound_upper")
    n = table.column("n_sites")
    gap = table.column("gap_est")
    se = table.column("gap_stderr")
    lower = table.column("bound_lower")
    upper = table.column("bound_upper")

    ax.errorbar(n, gap, yerr=2.0 * se, fmt="o-", capsize=3, label="gap estimate")
    ok = np.isfinite(lower)
    if ok.any():
        ax.plot(n[ok], lower[ok], "s--", label="closed-form lower bound")
    ok = np.isfinite(upper)
    if ok.any():
        ax.plot(n[ok], upper[ok], "v:", label="variational upper bound")
    ref = gap[0] * (n / n[0]) ** -2.0
    ax.plot(n, ref, "k:", lw=1.0, label="slope -2 reference")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xticks(n)
    ax.set_xticklabels([f"{int(v):d}" for v in n])
    slope = table.footer_value("slope")
    if slope is not None:
        stderr = table.footer_value("slope_stderr")
        ax.text(
            0.05, 0.06, f"slope {slope:.3g} +- {stderr:.2g}",
            transform=ax.transAxes, fontsize=10,
            bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8},
        )
    ax.legend()
    model = table.footer_value("model")
    _style_axes(ax, spec, "sites N", "spectral gap", f"gap vs size, {model}")


def _render_density(table: Table, spec: FigureSpec, ax) -> None:
    table.require("ratio_1")
    ratios = table.column("ratio_1")
    dim_d = float(table.footer_value("dim_d"))
    normalizer = float(table.footer_value("p_normalizer"))

    bins = np.linspace(0.0, 1.0, int(spec.option("bins")) + 1)
    ax.hist(ratios, bins=bins, density=True, alpha=0.45, label="ratio samples")
    b = np.linspace(0.0, 1.0, 801)[1:-1]
    nu = _beta_density(b, dim_d)
    ax.plot(b, nu, lw=1.5, label=f"stationary density, d={dim_d:g}")
    if normalizer != 1.0:
        # only the billiard kernel carries a non-flat rate factor
        ax.plot(b, nu * _gg_lambda_r(b) / normalizer, "--", lw=1.5,
                label="event-weighted density")
    ax.legend()
    n = table.footer_value("n_sites")
    _style_axes(ax, spec, "bond energy ratio", "density", f"ratio marginal, N={n}")


def _render_heatmap(table: Table, spec: FigureSpec, ax) -> None:
    table.require("beta", "alpha", "asymmetry")
    betas = np.unique(table.column("beta"))
    alphas = np.unique(table.column("alpha"))
    z = table.column("asymmetry")
    if z.size != betas.size * alphas.size:
        raise SchemaError(f"{table.path} rows do not form a full grid")
    grid = z.reshape(betas.size, alphas.size)
    residual = float(table.footer_value("residual"))

    mesh = ax.pcolormesh(alphas, betas, grid, cmap="viridis", shading="auto")
    bar = ax.figure.colorbar(mesh, ax=ax)
    bar.set_label("|flux(b,a) - flux(a,b)|")
    ax.grid(False)
    _style_axes(
        ax, spec, "ratio after", "ratio before",
        f"detailed-balance asymmetry, max {residual:.3g}",
    )
    ax.grid(False)  # styling turns it back on; a heatmap stays clean


_RENDERERS = {
    "decay": _render_decay,
    "scaling": _render_scaling,
    "density": _render_density,
    "heatmap": _render_heatmap,
}


def render(spec: FigureSpec) -> str:
    """Render one figure and return the output path."""
    table = read_table(spec.input)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=tuple(spec.option("figsize")))
        try:
            _RENDERERS[spec.kind](table, spec, ax)
            metadata = {"Date": None} if spec.output.endswith(".svg") else None
            fig.savefig(spec.output, dpi=spec.option("dpi"), metadata=metadata)
        finally:
            plt.close(fig)
    return os.path.abspath(spec.output)
