"""Energy configurations on a chain, pair exchange moves, and the path metric.

A configuration assigns a nonnegative energy to each of ``N >= 2`` sites.
The dynamics only ever redistributes the energy of a neighboring pair, so the
total energy (equivalently the mean ``eps``) is a conserved quantity and every
trajectory lives on the simplex of fixed mean.  Distances between two
configurations on the same simplex are measured through the vector of centered
partial sums ("u-coordinates"), which turns the pair exchange into a local
averaging map and makes contraction estimates tractable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "EnergyState",
    "UCoords",
    "ExchangeMove",
    "apply_exchange",
    "to_u",
    "from_u",
    "metric",
    "diameter_bound",
]

# Relative slack (in units of eps) when deciding whether two states share a
# simplex and when clamping round-trip noise in from_u.
_REL_TOL = 1e-9
_CLAMP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EnergyState:
    """Immutable vector of site energies.

    Parameters
    ----------
    energies : array_like
        Nonnegative, finite energies, one per site; at least two sites.
    total : float, optional
        Total energy of the configuration.  Computed once (exactly rounded)
        when omitted.  Exchange moves split a pooled pair sum and never
        recompute the total, so it is propagated unchanged and conservation
        holds bitwise over any move sequence; the stored value may differ
        from a fresh summation of the array by accumulated pair-rounding at
        the ulp scale, which is checked to stay within 1e-9 relative.
    """

    energies: np.ndarray
    total: float | None = None

    def __post_init__(self) -> None:
        arr = np.array(self.energies, dtype=np.float64, copy=True).reshape(-1)
        if arr.size < 2:
            raise ValueError("need at least two sites")
        if not np.all(np.isfinite(arr)):
            raise ValueError("energies must be finite")
        if np.any(arr < 0.0):
            raise ValueError("energies must be nonnegative")
        arr.flags.writeable = False
        object.__setattr__(self, "energies", arr)
        fresh = math.fsum(arr)
        if self.total is None:
            object.__setattr__(self, "total", fresh)
        else:
            total = float(self.total)
            if not math.isfinite(total) or abs(total - fresh) > _REL_TOL * max(
                abs(total), 1.0
            ):
                raise ValueError(
                    f"claimed total {total!r} is inconsistent with the energies"
                )
            object.__setattr__(self, "total", total)

    @property
    def n_sites(self) -> int:
        return int(self.energies.size)

    def mean_energy(self) -> float:
        return self.total / self.n_sites

    def to_json(self) -> list[float]:
        return [float(e) for e in self.energies]

    @classmethod
    def from_json(cls, values) -> "EnergyState":
        return cls(np.asarray(values, dtype=np.float64))

    def to_csv_row(self) -> str:
        return ",".join(repr(float(e)) for e in self.energies)

    @classmethod
    def from_csv_row(cls, row: str) -> "EnergyState":
        return cls(np.array([float(tok) for tok in row.split(",")]))

    def __repr__(self) -> str:  # keep reprs short in test failures
        body = ", ".join(f"{e:g}" for e in self.energies)
        return f"EnergyState([{body}])"


@dataclass(frozen=True, eq=False)
class UCoords:
    """Centered partial sums u_i = sum_{k<=i} (x_k - eps), i = 1..N-1.

    The boundary values u_0 = u_N = 0 are implicit.  Each u_i lies in the box
    [-i*eps, (N - i)*eps]; the exact simplex constraints are equivalent to all
    reconstructed energies being nonnegative (see from_u).
    """

    u: np.ndarray
    epsilon: float
    n_sites: int

    def __post_init__(self) -> None:
        arr = np.array(self.u, dtype=np.float64, copy=True).reshape(-1)
        if self.n_sites < 2:
            raise ValueError("need at least two sites")
        if arr.size != self.n_sites - 1:
            raise ValueError(
                f"expected {self.n_sites - 1} interior coordinates, got {arr.size}"
            )
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ValueError("epsilon must be positive and finite")
        if not np.all(np.isfinite(arr)):
            raise ValueError("u coordinates must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "u", arr)


@dataclass(frozen=True)
class ExchangeMove:
    """A single pair exchange: bond ``i`` couples sites ``(i, i+1)``, 1-based.

    The move pools the two energies and hands a fraction ``alpha`` to the left
    site.
    """

    bond: int
    alpha: float

    def __post_init__(self) -> None:
        if self.bond < 1:
            raise ValueError("bond index is 1-based and must be >= 1")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")


def split_pair_sum(s: float, alpha: float) -> tuple[float, float]:
    """Split ``s >= 0`` into ``(alpha*s, (1-alpha)*s)`` with an exact total.

    The majority share is formed by multiplication and the minority share by
    subtraction; the subtraction is exact (Sterbenz), so the two parts sum to
    ``s`` in real arithmetic and totals are conserved bitwise under exact
    summation.
    """
    if alpha >= 0.5:
        left = alpha * s
        return left, s - left
    right = (1.0 - alpha) * s
    return s - right, right


def apply_exchange(state: EnergyState, move: ExchangeMove) -> EnergyState:
    """Apply one pair exchange and return the new state.

    Raises
    ------
    ValueError
        If the bond index falls outside ``1..N-1``.
    """
    n = state.n_sites
    if not 1 <= move.bond <= n - 1:
        raise ValueError(f"bond must lie in 1..{n - 1}, got {move.bond}")
    i = move.bond - 1
    x = np.array(state.energies, copy=True)
    s = x[i] + x[i + 1]
    x[i], x[i + 1] = split_pair_sum(float(s), move.alpha)
    return EnergyState(x, total=state.total)


def to_u(state: EnergyState) -> UCoords:
    """Map a state to its interior u-coordinates (mean as ``epsilon``)."""
    eps = state.mean_energy()
    u = np.cumsum(state.energies - eps)[:-1]
    return UCoords(u=u, epsilon=eps, n_sites=state.n_sites)


def from_u(coords: UCoords) -> EnergyState:
    """Invert to_u: x_i = eps + u_i - u_{i-1} with u_0 = u_N = 0.

    Raises
    ------
    ValueError
        If the coordinates violate the simplex constraints, i.e. some
        reconstructed energy is negative beyond round-off slack.
    """
    eps = coords.epsilon
    padded = np.concatenate(([0.0], coords.u, [0.0]))
    x = eps + np.diff(padded)
    floor = -_CLAMP_TOL * eps
    bad = np.nonzero(x < floor)[0]
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"simplex violation: site {i + 1} reconstructs to {x[i]!r} < 0"
        )
    # Round-off from cumsum/diff may leave harmless -1e-28-scale values.
    np.clip(x, 0.0, None, out=x)
    return EnergyState(x)


def _require_same_simplex(a: EnergyState, b: EnergyState) -> None:
    if a.n_sites != b.n_sites:
        raise ValueError(f"site counts differ: {a.n_sites} vs {b.n_sites}")
    ta, tb = a.total, b.total
    if abs(ta - tb) > _REL_TOL * max(abs(ta), abs(tb), 1.0):
        raise ValueError(f"states lie on different simplexes: totals {ta} vs {tb}")


def metric(a: EnergyState, b: EnergyState) -> float:
    """Euclidean distance between the u-coordinate vectors of two states.

    Both states must have the same site count and the same total energy; a
    mismatched call is an error rather than a silent projection.
    """
    _require_same_simplex(a, b)
    diff = np.cumsum(a.energies - b.energies)[:-1]
    return float(np.sqrt(np.dot(diff, diff)))


def diameter_bound(epsilon: float, n_sites: int) -> float:
    """Upper bound ``eps * N * sqrt(N - 1)`` for the metric on one simplex."""
    if not (epsilon > 0.0):
        raise ValueError("epsilon must be positive")
    if n_sites < 2:
        raise ValueError("need at least two sites")
    return epsilon * n_sites * math.sqrt(n_sites - 1.0)
