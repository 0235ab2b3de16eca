"""Continuous-time simulation of the energy-exchange chain.

Bonds fire independently: bond ``i`` (coupling sites ``i`` and ``i+1``) waits
an exponential time with rate ``Lambda(x_i, x_{i+1})``, then redistributes the
pair energy by a kernel draw.  ``simulate_ct`` runs one trajectory with an
event loop over a partial-sum tree of bond rates, recomputing only the rates
the event touched.  ``simulate_coupled`` runs two copies fed by the same bond
and kernel draws, which is the construction behind the contraction estimates.

Replica ensembles are the unit of parallel work.  The ensemble engines
vectorize over fixed-size replica blocks (256 replicas) and derive one RNG
substream per block from ``(seed, block index)``, so results are bit-identical
for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .kernels import AlphaKernel, RateSpec
from .state import EnergyState, ExchangeMove, apply_exchange, split_pair_sum

__all__ = [
    "Model",
    "Observable",
    "total_energy",
    "site_energy",
    "bond_ratio",
    "fourier_mode",
    "u_coordinate",
    "JumpEvent",
    "Trajectory",
    "CoupledTrajectory",
    "ObservableTable",
    "step_embedded",
    "run_embedded",
    "simulate_ct",
    "simulate_coupled",
    "record_observables",
    "trajectory_samples_csv",
    "event_log_csv",
    "EnsemblePaths",
    "ensemble_paths",
    "coupled_d2_ensemble",
    "BLOCK_SIZE",
]

# Replicas per vectorized block; fixed so the block partition (and therefore
# every RNG substream) does not depend on the thread count.
BLOCK_SIZE = 256


@dataclass(frozen=True)
class Model:
    """A kernel plus a rate specification; the state supplies N and eps."""

    kernel: AlphaKernel
    rates: RateSpec

    @property
    def is_reference(self) -> bool:
        """Constant bond rate and ratio-independent kernel."""
        return self.rates.is_constant and self.kernel.state_independent

    def describe(self) -> str:
        return f"{self.rates.describe()}|{self.kernel.describe()}"


@dataclass(frozen=True)
class Observable:
    """Named function of the energy vector, vectorized over rows."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, states: np.ndarray) -> np.ndarray:
        return np.asarray(self.fn(np.atleast_2d(states)))


def total_energy() -> Observable:
    """Exact recomputed row total; constant along trajectories up to the
    ulp-scale pair rounding accumulated by the raw vectors (the proper
    conserved quantity is EnergyState.total)."""
    return Observable("total", lambda x: np.array([math.fsum(row) for row in x]))


def site_energy(site: int) -> Observable:
    if site < 1:
        raise ValueError("site index is 1-based")
    return Observable(f"site_{site}", lambda x: x[:, site - 1].copy())


def bond_ratio(bond: int) -> Observable:
    if bond < 1:
        raise ValueError("bond index is 1-based")
    i = bond - 1

    def fn(x: np.ndarray) -> np.ndarray:
        s = x[:, i] + x[:, i + 1]
        pos = s > 0.0
        return np.where(pos, x[:, i] / np.where(pos, s, 1.0), 0.5)

    return Observable(f"ratio_{bond}", fn)


def fourier_mode(k: int, n_sites: int) -> Observable:
    """Linear mode ``sum_i cos(pi k (i - 1/2) / N) x_i`` (mean zero on a simplex)."""
    if not 1 <= k <= n_sites - 1:
        raise ValueError(f"mode index must lie in 1..{n_sites - 1}")
    coeffs = np.cos(np.pi * k * (np.arange(n_sites) + 0.5) / n_sites)
    return Observable(f"fourier_{k}", lambda x: x @ coeffs)


def u_coordinate(i: int) -> Observable:
    """Centered partial sum u_i = sum_{k<=i}(x_k - mean)."""
    if i < 1:
        raise ValueError("coordinate index is 1-based")

    def fn(x: np.ndarray) -> np.ndarray:
        eps = x.mean(axis=1, keepdims=True)
        return np.cumsum(x - eps, axis=1)[:, i - 1]

    return Observable(f"u_{i}", fn)


@dataclass(frozen=True)
class JumpEvent:
    time: float
    bond: int  # 1-based
    alpha: float


@dataclass(frozen=True)
class Trajectory:
    """One continuous-time path sampled on a fixed grid.

    ``states[j]`` is the energy vector at ``times[j]``; the event log is kept
    only when requested.
    """

    initial: EnergyState
    times: np.ndarray
    states: np.ndarray
    n_events: int
    absorbed: bool
    events: tuple[JumpEvent, ...] | None = None

    def sample_states(self) -> list[tuple[float, EnergyState]]:
        total = self.initial.total
        return [
            (float(t), EnergyState(row, total=total))
            for t, row in zip(self.times, self.states)
        ]


@dataclass(frozen=True)
class CoupledTrajectory:
    """Two paths driven by one event stream, summarized by the squared metric."""

    times: np.ndarray
    d_sq: np.ndarray
    final_x: EnergyState
    final_y: EnergyState
    n_events: int
    events: tuple[JumpEvent, ...] | None = None


@dataclass(frozen=True)
class ObservableTable:
    times: np.ndarray
    names: tuple[str, ...]
    values: np.ndarray  # (len(times), len(names))


class _FenwickTree:
    """Partial-sum tree over bond rates: O(log n) update and rate search."""

    def __init__(self, values: np.ndarray) -> None:
        self.n = len(values)
        self.values = [float(v) for v in values]
        self.tree = [0.0] * (self.n + 1)
        for i, v in enumerate(self.values):
            self._add(i, v)
        self._mask = 1 << (self.n.bit_length())

    def _add(self, i: int, delta: float) -> None:
        j = i + 1
        while j <= self.n:
            self.tree[j] += delta
            j += j & (-j)

    def set(self, i: int, value: float) -> None:
        value = float(value)
        self._add(i, value - self.values[i])
        self.values[i] = value

    @property
    def total(self) -> float:
        j = self.n
        out = 0.0
        while j > 0:
            out += self.tree[j]
            j -= j & (-j)
        return out

    def find(self, target: float) -> int:
        """Smallest index whose prefix sum reaches ``target`` (0 < target <= total)."""
        idx = 0
        mask = self._mask
        while mask:
            nxt = idx + mask
            if nxt <= self.n and self.tree[nxt] < target:
                target -= self.tree[nxt]
                idx = nxt
            mask >>= 1
        idx = min(idx, self.n - 1)
        if self.values[idx] <= 0.0:
            # Round-off can land the search on a dead bond; take the busiest one.
            idx = int(np.argmax(self.values))
        return idx


def _require_positive_mean(state: EnergyState) -> None:
    if not state.total > 0.0:
        raise ValueError("simulation requires a state with positive mean energy")


def _pair_beta(left: float, s: float) -> float:
    return left / s if s > 0.0 else 0.5


def step_embedded(state: EnergyState, model: Model, rng: np.random.Generator) -> EnergyState:
    """One step of the embedded discrete chain: uniform bond, kernel draw.

    Defined for constant-rate models, where the continuous-time process picks
    every bond with equal probability.
    """
    if not model.rates.is_constant:
        raise ValueError("embedded chain requires a constant-rate model")
    _require_positive_mean(state)
    bond = int(rng.integers(1, state.n_sites))
    x = state.energies
    beta = _pair_beta(float(x[bond - 1]), float(x[bond - 1] + x[bond]))
    alpha = float(model.kernel.sample(beta, rng))
    return apply_exchange(state, ExchangeMove(bond=bond, alpha=alpha))


def run_embedded(
    state: EnergyState,
    model: Model,
    n_steps: int,
    rng: np.random.Generator,
    collect_bond_counts: bool = False,
) -> tuple[EnergyState, np.ndarray | None]:
    """Apply ``n_steps`` embedded steps; optionally tally bond choices."""
    if not model.rates.is_constant:
        raise ValueError("embedded chain requires a constant-rate model")
    _require_positive_mean(state)
    n = state.n_sites
    x = np.array(state.energies)
    counts = np.zeros(n - 1, dtype=np.int64) if collect_bond_counts else None
    if model.kernel.state_independent:
        bonds = rng.integers(0, n - 1, size=n_steps)
        alphas = np.atleast_1d(model.kernel.sample(np.full(n_steps, 0.5), rng))
        for i, alpha in zip(bonds, alphas):
            s = x[i] + x[i + 1]
            x[i], x[i + 1] = split_pair_sum(float(s), float(alpha))
            if counts is not None:
                counts[i] += 1
    else:
        for _ in range(n_steps):
            i = int(rng.integers(0, n - 1))
            s = float(x[i] + x[i + 1])
            alpha = float(model.kernel.sample(_pair_beta(float(x[i]), s), rng))
            x[i], x[i + 1] = split_pair_sum(s, alpha)
            if counts is not None:
                counts[i] += 1
    return EnergyState(x, total=state.total), counts


def _sample_grid(horizon: float, sample_times) -> np.ndarray:
    if not (horizon > 0.0 and math.isfinite(horizon)):
        raise ValueError("horizon must be positive and finite")
    if sample_times is None:
        return np.array([0.0, horizon])
    ts = np.asarray(sample_times, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("sample_times must be a nonempty 1-d grid")
    if np.any(np.diff(ts) < 0.0):
        raise ValueError("sample_times must be nondecreasing")
    if ts[0] < 0.0 or ts[-1] > horizon:
        raise ValueError("sample_times must lie within [0, horizon]")
    return ts


def simulate_ct(
    x0: EnergyState,
    model: Model,
    horizon: float,
    rng: np.random.Generator,
    sample_times=None,
    log_events: bool = False,
) -> Trajectory:
    """Run one trajectory to time ``horizon``, sampling states on a grid.

    After each event only the rates of the touched bonds (the event's bond and
    its two neighbors) are recomputed.  If every bond rate hits zero the state
    can never move again; remaining samples repeat it and the trajectory is
    flagged ``absorbed``.
    """
    _require_positive_mean(x0)
    ts = _sample_grid(horizon, sample_times)
    n = x0.n_sites
    x = np.array(x0.energies)
    tree = _FenwickTree(np.asarray(model.rates.bond_rates(x[:-1], x[1:])))
    states = np.empty((ts.size, n))
    events: list[JumpEvent] = []
    t = 0.0
    p = 0  # next sample to record
    n_events = 0
    absorbed = False
    while True:
        total = tree.total
        if total <= 0.0:
            absorbed = True
            break
        t_next = t + rng.exponential(1.0 / total)
        while p < ts.size and ts[p] < t_next:
            states[p] = x
            p += 1
        if t_next > horizon:
            break
        i = tree.find((1.0 - rng.uniform()) * total)
        s = float(x[i] + x[i + 1])
        alpha = float(model.kernel.sample(_pair_beta(float(x[i]), s), rng))
        x[i], x[i + 1] = split_pair_sum(s, alpha)
        lo, hi = max(i - 1, 0), min(i + 1, n - 2)
        fresh = model.rates.bond_rates(x[lo : hi + 1], x[lo + 1 : hi + 2])
        for j, v in zip(range(lo, hi + 1), np.atleast_1d(fresh)):
            tree.set(j, v)
        n_events += 1
        if log_events:
            events.append(JumpEvent(time=t_next, bond=i + 1, alpha=alpha))
        t = t_next
    while p < ts.size:
        states[p] = x
        p += 1
    return Trajectory(
        initial=x0,
        times=ts,
        states=states,
        n_events=n_events,
        absorbed=absorbed,
        events=tuple(events) if log_events else None,
    )


def _d_sq(x: np.ndarray, y: np.ndarray) -> float:
    w = np.cumsum(x - y)[:-1]
    return float(np.dot(w, w))


def simulate_coupled(
    x0: EnergyState,
    y0: EnergyState,
    model: Model,
    horizon: float,
    rng: np.random.Generator,
    sample_times=None,
    log_events: bool = False,
) -> CoupledTrajectory:
    """Evolve two states with shared bond choices and shared kernel draws.

    Requires a constant-rate model with a ratio-independent kernel; otherwise
    the two copies would disagree about event rates or draw laws and the
    shared stream would not define a coupling.  Records the squared metric on
    the sample grid.
    """
    if not model.is_reference:
        raise ValueError(
            "coupled simulation requires a constant rate and a "
            "ratio-independent kernel"
        )
    _require_positive_mean(x0)
    _require_positive_mean(y0)
    if x0.n_sites != y0.n_sites:
        raise ValueError("coupled states need equal site counts")
    if abs(x0.total - y0.total) > 1e-9 * max(x0.total, y0.total):
        raise ValueError("coupled states must lie on the same simplex")
    ts = _sample_grid(horizon, sample_times)
    n = x0.n_sites
    x = np.array(x0.energies)
    y = np.array(y0.energies)
    total_rate = model.rates.constant_value * (n - 1)
    d_sq = np.empty(ts.size)
    events: list[JumpEvent] = []
    t = 0.0
    p = 0
    n_events = 0
    while True:
        t_next = t + rng.exponential(1.0 / total_rate)
        while p < ts.size and ts[p] < t_next:
            d_sq[p] = _d_sq(x, y)
            p += 1
        if t_next > horizon:
            break
        i = int(rng.integers(0, n - 1))
        alpha = float(model.kernel.sample(0.5, rng))
        x[i], x[i + 1] = split_pair_sum(float(x[i] + x[i + 1]), alpha)
        y[i], y[i + 1] = split_pair_sum(float(y[i] + y[i + 1]), alpha)
        n_events += 1
        if log_events:
            events.append(JumpEvent(time=t_next, bond=i + 1, alpha=alpha))
        t = t_next
    while p < ts.size:
        d_sq[p] = _d_sq(x, y)
        p += 1
    return CoupledTrajectory(
        times=ts,
        d_sq=d_sq,
        final_x=EnergyState(x, total=x0.total),
        final_y=EnergyState(y, total=y0.total),
        n_events=n_events,
        events=tuple(events) if log_events else None,
    )


def record_observables(
    traj: Trajectory, observables: Sequence[Observable]
) -> ObservableTable:
    """Evaluate named observables on every recorded sample."""
    if not observables:
        raise ValueError("need at least one observable")
    values = np.column_stack([obs(traj.states) for obs in observables])
    return ObservableTable(
        times=traj.times,
        names=tuple(obs.name for obs in observables),
        values=values,
    )


def trajectory_samples_csv(
    traj: Trajectory, observables: Sequence[Observable], replica: int, fh
) -> None:
    """Stream samples as ``time,replica,observable,value`` rows."""
    table = record_observables(traj, observables)
    fh.write("time,replica,observable,value\n")
    for j, t in enumerate(table.times):
        for k, name in enumerate(table.names):
            fh.write(f"{t!r},{replica},{name},{table.values[j, k]!r}\n")


def event_log_csv(traj, fh) -> None:
    """Stream the event log as ``time,bond,alpha`` rows."""
    if traj.events is None:
        raise ValueError("trajectory carries no event log; pass log_events=True")
    fh.write("time,bond,alpha\n")
    for ev in traj.events:
        fh.write(f"{ev.time!r},{ev.bond},{ev.alpha!r}\n")


# --- replica ensembles ------------------------------------------------------


@dataclass(frozen=True)
class EnsemblePaths:
    times: np.ndarray
    names: tuple[str, ...]
    values: np.ndarray  # (n_replicas, len(times), len(names))
    counts: np.ndarray | None  # events per replica, when requested
    n_absorbed: int


def _block_bounds(n_replicas: int) -> list[tuple[int, int]]:
    return [
        (lo, min(lo + BLOCK_SIZE, n_replicas))
        for lo in range(0, n_replicas, BLOCK_SIZE)
    ]


def _block_rngs(seed: int, n_blocks: int) -> list[np.random.Generator]:
    root = np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in root.spawn(n_blocks)]


def _run_blocks(n_replicas: int, seed: int, threads: int, worker):
    bounds = _block_bounds(n_replicas)
    rngs = _block_rngs(seed, len(bounds))
    jobs = list(zip(bounds, rngs))
    if threads <= 1:
        return [worker(lo, hi, rng) for (lo, hi), rng in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: worker(job[0][0], job[0][1], job[1]), jobs))


def _initial_block(initial, size: int, n_expected: int | None, rng) -> np.ndarray:
    if isinstance(initial, EnergyState):
        x = np.tile(initial.energies, (size, 1))
    else:
        x = np.array(initial(size, rng), dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != size:
        raise ValueError("initial sampler must return one row per replica")
    if n_expected is not None and x.shape[1] != n_expected:
        raise ValueError("initial rows have the wrong number of sites")
    return x


def _exchange_rows(x: np.ndarray, rows: np.ndarray, bonds: np.ndarray, alphas: np.ndarray) -> None:
    """Vectorized pair exchange; same split rule as state.split_pair_sum."""
    s = x[rows, bonds] + x[rows, bonds + 1]
    big = np.maximum(alphas, 1.0 - alphas) * s
    small = s - big
    x[rows, bonds] = np.where(alphas >= 0.5, big, small)
    x[rows, bonds + 1] = np.where(alphas >= 0.5, small, big)


def _draw_alphas(kernel: AlphaKernel, x, rows, bonds, rng) -> np.ndarray:
    if kernel.state_independent:
        return np.atleast_1d(kernel.sample(np.full(rows.size, 0.5), rng))
    left = x[rows, bonds]
    s = left + x[rows, bonds + 1]
    pos = s > 0.0
    beta = np.where(pos, left / np.where(pos, s, 1.0), 0.5)
    return np.atleast_1d(kernel.sample(beta, rng))


def _advance_constant(
    x: np.ndarray, model: Model, dt: float, rng: np.random.Generator
) -> np.ndarray:
    """Advance every row by time ``dt`` under a constant-rate model.

    Event counts are Poisson with the (constant) total rate; conditioned on
    the count, events form an iid embedded-chain sequence, so no event clocks
    are needed.
    """
    size, n = x.shape
    lam_total = model.rates.constant_value * (n - 1)
    k = rng.poisson(lam_total * dt, size=size)
    for m in range(int(k.max()) if size else 0):
        rows = np.nonzero(k > m)[0]
        bonds = rng.integers(0, n - 1, size=rows.size)
        alphas = _draw_alphas(model.kernel, x, rows, bonds, rng)
        _exchange_rows(x, rows, bonds, alphas)
    return k


def _advance_gillespie(
    x: np.ndarray,
    model: Model,
    rates: np.ndarray,
    clocks: np.ndarray,
    t_end: float,
    rng: np.random.Generator,
    counts: np.ndarray,
) -> None:
    """Advance rows with state-dependent rates to ``t_end`` (exact event loop).

    Rows whose next event would overshoot the boundary freeze there; by
    memorylessness the discarded residual clock costs nothing.  Only the three
    bond rates an event touches are recomputed.
    """
    n = x.shape[1]
    tot = rates.sum(axis=1)
    while True:
        act = np.nonzero((clocks < t_end) & (tot > 0.0))[0]
        if act.size == 0:
            break
        clocks[act] += rng.exponential(size=act.size) / tot[act]
        live = act[clocks[act] < t_end]
        clocks[act[clocks[act] >= t_end]] = t_end
        if live.size == 0:
            continue
        row_rates = rates[live]
        cum = np.cumsum(row_rates, axis=1)
        u = rng.uniform(size=live.size) * cum[:, -1]
        bonds = (cum < u[:, None]).sum(axis=1)
        bonds = np.minimum(bonds, n - 2)
        dead = row_rates[np.arange(live.size), bonds] <= 0.0
        if np.any(dead):
            # Round-off landed the search on a dead bond; take the busiest one.
            bonds[dead] = np.argmax(row_rates[dead], axis=1)
        alphas = _draw_alphas(model.kernel, x, live, bonds, rng)
        _exchange_rows(x, live, bonds, alphas)
        for off in (-1, 0, 1):
            j = bonds + off
            ok = (j >= 0) & (j <= n - 2)
            rows, jj = live[ok], j[ok]
            rates[rows, jj] = model.rates.bond_rates(x[rows, jj], x[rows, jj + 1])
        tot[live] = rates[live].sum(axis=1)
        counts[live] += 1
    # Absorbed rows (zero total rate) simply stay put until the boundary.
    clocks[clocks < t_end] = t_end


def ensemble_paths(
    model: Model,
    initial,
    observables: Sequence[Observable],
    horizon: float,
    n_samples: int,
    n_replicas: int,
    seed: int,
    threads: int = 1,
    return_counts: bool = False,
) -> EnsemblePaths:
    """Observable paths for a replica ensemble on a uniform sample grid.

    ``initial`` is either an EnergyState shared by every replica or a callable
    ``(size, rng) -> (size, N) array`` drawing one start per replica.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample interval")
    if n_replicas < 1:
        raise ValueError("need at least one replica")
    if not observables:
        raise ValueError("need at least one observable")
    times = np.linspace(0.0, horizon, n_samples + 1)
    n_expected = initial.n_sites if isinstance(initial, EnergyState) else None
    n_obs = len(observables)

    def worker(lo: int, hi: int, rng: np.random.Generator):
        size = hi - lo
        x = _initial_block(initial, size, n_expected, rng)
        vals = np.empty((size, times.size, n_obs))
        counts = np.zeros(size, dtype=np.int64)
        for kk, obs in enumerate(observables):
            vals[:, 0, kk] = obs(x)
        if model.rates.is_constant:
            dt = float(times[1] - times[0])
            for j in range(1, times.size):
                counts += _advance_constant(x, model, dt, rng)
                for kk, obs in enumerate(observables):
                    vals[:, j, kk] = obs(x)
            absorbed = 0
        else:
            rates = np.asarray(model.rates.bond_rates(x[:, :-1], x[:, 1:]))
            clocks = np.zeros(size)
            for j in range(1, times.size):
                _advance_gillespie(x, model, rates, clocks, float(times[j]), rng, counts)
                for kk, obs in enumerate(observables):
                    vals[:, j, kk] = obs(x)
            absorbed = int(np.sum(rates.sum(axis=1) <= 0.0))
        return vals, counts, absorbed

    parts = _run_blocks(n_replicas, seed, threads, worker)
    values = np.concatenate([p[0] for p in parts], axis=0)
    counts = np.concatenate([p[1] for p in parts]) if return_counts else None
    return EnsemblePaths(
        times=times,
        names=tuple(obs.name for obs in observables),
        values=values,
        counts=counts,
        n_absorbed=sum(p[2] for p in parts),
    )


def coupled_d2_ensemble(
    x0: EnergyState,
    y0: EnergyState,
    model: Model,
    horizon: float,
    n_samples: int,
    n_replicas: int,
    seed: int,
    threads: int = 1,
    return_counts: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Squared coupled distance on a grid for many independent couplings.

    The difference of the two u-coordinate vectors is autonomous under the
    shared-draw coupling: an event at bond ``i`` replaces ``w_i`` by
    ``(1-alpha) w_{i-1} + alpha w_{i+1}`` and the mean-energy terms cancel.
    Evolving ``w`` alone reproduces the squared metric pathwise, which is what
    this engine returns, one row per replica.
    """
    if not model.is_reference:
        raise ValueError(
            "coupled simulation requires a constant rate and a "
            "ratio-independent kernel"
        )
    if x0.n_sites != y0.n_sites:
        raise ValueError("coupled states need equal site counts")
    if abs(x0.total - y0.total) > 1e-9 * max(x0.total, y0.total):
        raise ValueError("coupled states must lie on the same simplex")
    n = x0.n_sites
    times = np.linspace(0.0, horizon, n_samples + 1)
    w0 = np.cumsum(x0.energies - y0.energies)[:-1]
    lam_total = model.rates.constant_value * (n - 1)

    def worker(lo: int, hi: int, rng: np.random.Generator):
        size = hi - lo
        # Guard columns 0 and n hold the boundary zeros of the u-coordinates.
        w = np.zeros((size, n + 1))
        w[:, 1:n] = w0
        d2 = np.empty((size, times.size))
        d2[:, 0] = np.einsum("ij,ij->i", w[:, 1:n], w[:, 1:n])
        counts = np.zeros(size, dtype=np.int64)
        dt = float(times[1] - times[0])
        for j in range(1, times.size):
            k = rng.poisson(lam_total * dt, size=size)
            counts += k
            for m in range(int(k.max())):
                rows = np.nonzero(k > m)[0]
                cols = rng.integers(1, n, size=rows.size)
                alphas = np.atleast_1d(
                    model.kernel.sample(np.full(rows.size, 0.5), rng)
                )
                w[rows, cols] = (1.0 - alphas) * w[rows, cols - 1] + alphas * w[
                    rows, cols + 1
                ]
            d2[:, j] = np.einsum("ij,ij->i", w[:, 1:n], w[:, 1:n])
        return d2, counts, 0

    parts = _run_blocks(n_replicas, seed, threads, worker)
    d2 = np.concatenate([p[0] for p in parts], axis=0)
    counts = np.concatenate([p[1] for p in parts]) if return_counts else None
    return times, d2, counts
