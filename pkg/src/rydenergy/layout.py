"""Square-grid geometry, mean inter-atom distance, and transport costs.

The analytic transport model prices a move at (Euclidean distance in
cells) x (single-hop energy); the Monte-Carlo simulator walks Manhattan
paths and reports both metrics so the two conventions can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .hwmodel import HardwareProfile

MOVE_ADJACENT_AND_RETURN = "move_adjacent_and_return"
MOVE_ADJACENT_STAY = "move_adjacent_stay"
TRANSPORT_POLICIES = (MOVE_ADJACENT_AND_RETURN, MOVE_ADJACENT_STAY)

#: Fixed default seed: runs are reproducible unless a seed is given.
DEFAULT_SEED = 12345


def grid_side(n_atoms: int) -> int:
    """Side of the smallest square grid holding n_atoms, ceil(sqrt(n))."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    return math.isqrt(n_atoms - 1) + 1


def _row_major_occupancy(n_atoms: int, side: int) -> dict[int, tuple[int, int]]:
    return {atom: (atom // side, atom % side) for atom in range(n_atoms)}


@dataclass(frozen=True)
class GridLayout:
    """Atoms on a ceil(sqrt(n)) x ceil(sqrt(n)) grid, filled row-major."""

    n_atoms: int
    spacing: float = 3e-6  # m
    occupancy: dict[int, tuple[int, int]] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        side = grid_side(self.n_atoms)
        if self.occupancy is None:
            object.__setattr__(self, "occupancy", _row_major_occupancy(self.n_atoms, side))
        cells = set(self.occupancy.values())
        if len(cells) != len(self.occupancy):
            raise ValueError("occupancy must be injective (one atom per cell)")
        for cell in cells:
            if not (0 <= cell[0] < side and 0 <= cell[1] < side):
                raise ValueError(f"cell {cell} outside the {side}x{side} grid")
        if self.spacing <= 0:
            raise ValueError("spacing must be > 0")

    @property
    def side(self) -> int:
        return grid_side(self.n_atoms)


@dataclass(frozen=True)
class TransportPolicy:
    """How an atom is brought next to its gate partner.

    ``move_adjacent_and_return`` sends it back home after the gate;
    ``move_adjacent_stay`` leaves it in the destination cell when that
    cell is free (on a fully occupied grid it degenerates to the return
    policy). ``blockade_radius`` is in cells, diagonal-inclusive
    (Chebyshev metric); pairs within it need no transport.
    """

    mode: str = MOVE_ADJACENT_AND_RETURN
    blockade_radius: int = 1

    def __post_init__(self):
        if self.mode not in TRANSPORT_POLICIES:
            raise ValueError(f"unknown transport policy {self.mode!r}")
        if self.blockade_radius < 1:
            raise ValueError("blockade_radius must be >= 1")


# --- mean pair distance -----------------------------------------------------


def _two_product(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dekker split: a*b == hi + lo exactly (round-to-nearest doubles)."""
    hi = a * b
    split = 134217729.0  # 2**27 + 1
    a1 = a * split
    a_hi = a1 - (a1 - a)
    a_lo = a - a_hi
    b1 = b * split
    b_hi = b1 - (b1 - b)
    b_lo = b - b_hi
    lo = ((a_hi * b_hi - hi) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return hi, lo


@lru_cache(maxsize=None)
def _mean_pair_distance_by_side(side: int) -> float:
    if side == 1:
        return 0.0
    d = np.arange(side, dtype=np.float64)
    count = np.where(d == 0, float(side), 2.0 * (side - d))
    multiplicity = np.outer(count, count)
    dist = np.sqrt(d[:, None] ** 2 + d[None, :] ** 2)
    # The multiplicity-weighted sum must equal the plain quadruple sum
    # bit for bit; splitting each product keeps fsum over an exact
    # representation of the same real number.
    hi, lo = _two_product(multiplicity, dist)
    total = math.fsum(np.concatenate([hi.ravel(), lo.ravel()]))
    return total / float(side) ** 4


def mean_pair_distance(n_atoms: int) -> float:
    """Mean Euclidean distance, in cells, between two uniform grid cells.

    Equals the quadruple sum over ordered cell pairs of the
    ceil(sqrt(n)) x ceil(sqrt(n)) grid divided by side^4, evaluated by
    displacement multiplicity in O(side^2).
    """
    return _mean_pair_distance_by_side(grid_side(n_atoms))


# --- transport costs --------------------------------------------------------


@dataclass(frozen=True)
class HopCost:
    time: float  # s
    energy: float  # J


def single_hop_cost(profile: HardwareProfile) -> HopCost:
    """Cost of moving an atom one cell: clear the trap beam, at max speed."""
    t1 = (
        profile.traps.grid_spacing + profile.traps.beam_width
    ) / profile.transport.max_speed
    return HopCost(time=t1, energy=profile.transport.tweezer_power * t1)


def transport_energy_analytic(n_atoms: int, profile: HardwareProfile) -> float:
    """slope x n(n-1) x D(n) x E1: every 2-qubit gate pays a mean-distance move."""
    if n_atoms < 1:
        raise ValueError("n_atoms must be >= 1")
    if n_atoms == 1:
        return 0.0
    e1 = single_hop_cost(profile).energy
    slope = profile.transport.transports_per_gate_slope
    return slope * n_atoms * (n_atoms - 1) * mean_pair_distance(n_atoms) * e1


# --- Monte-Carlo transport simulator ----------------------------------------


@dataclass(frozen=True)
class TransportSimResult:
    n_atoms: int
    n_gates: int
    seed: int
    policy: TransportPolicy
    cumulative_transports: np.ndarray
    cumulative_hops: np.ndarray
    cumulative_euclidean_cells: np.ndarray
    transports_per_gate: float  # least-squares slope of the cumulative curve
    r_squared: float

    def summary(self) -> dict:
        return {
            "n_atoms": self.n_atoms,
            "n_gates": self.n_gates,
            "seed": self.seed,
            "policy": self.policy.mode,
            "blockade_radius": self.policy.blockade_radius,
            "total_transports": int(self.cumulative_transports[-1]),
            "total_hops": int(self.cumulative_hops[-1]),
            "total_euclidean_cells": float(self.cumulative_euclidean_cells[-1]),
            "transports_per_gate": self.transports_per_gate,
            "r_squared": self.r_squared,
        }


def _fit_line(y: np.ndarray) -> tuple[float, float]:
    """Slope and R^2 of y against gate index 1..len(y)."""
    x = np.arange(1, len(y) + 1, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r_squared


def simulate_transports(
    n_atoms: int,
    n_gates: int,
    policy: TransportPolicy | None = None,
    seed: int = DEFAULT_SEED,
) -> TransportSimResult:
    """Count tweezer moves needed by a stream of random 2-qubit gates.

    Atoms start on a row-major-filled grid. For each gate whose pair sits
    outside the blockade radius, the atom with the cheaper trip is carried
    to the free-choice cell adjacent to its partner (minimum Manhattan
    trip, lexicographic tie-break); each carry is one transport, its hop
    count the Manhattan trip length. Return trips count as transports too.
    """
    if n_atoms < 2:
        raise ValueError("simulate_transports requires n_atoms >= 2")
    if n_gates < 1:
        raise ValueError("n_gates must be >= 1")
    policy = policy or TransportPolicy()
    side = grid_side(n_atoms)
    rng = np.random.default_rng(seed)

    position = _row_major_occupancy(n_atoms, side)
    occupied = {cell: atom for atom, cell in position.items()}

    cum_transports = np.zeros(n_gates, dtype=np.int64)
    cum_hops = np.zeros(n_gates, dtype=np.int64)
    cum_euclid = np.zeros(n_gates, dtype=np.float64)
    transports = 0
    hops = 0
    euclid = 0.0

    radius = policy.blockade_radius

    def destinations(target: tuple[int, int]):
        for dr in range(-radius, radius + 1):
            for dc in range(-radius, radius + 1):
                if dr == 0 and dc == 0:
                    continue
                r, c = target[0] + dr, target[1] + dc
                if 0 <= r < side and 0 <= c < side:
                    yield (r, c)

    def best_destination(home: tuple[int, int], target: tuple[int, int]):
        def trip(cell):
            return abs(cell[0] - home[0]) + abs(cell[1] - home[1])

        if policy.mode == MOVE_ADJACENT_STAY:
            # prefer a free cell so the atom can actually stay
            return min(
                destinations(target), key=lambda c: (c in occupied, trip(c), c)
            )
        return min(destinations(target), key=lambda c: (trip(c), c))

    for g in range(n_gates):
        a, b = rng.choice(n_atoms, size=2, replace=False)
        pa, pb = position[int(a)], position[int(b)]
        if max(abs(pa[0] - pb[0]), abs(pa[1] - pb[1])) > radius:
            dest_a = best_destination(pa, pb)
            dest_b = best_destination(pb, pa)
            trip_a = abs(dest_a[0] - pa[0]) + abs(dest_a[1] - pa[1])
            trip_b = abs(dest_b[0] - pb[0]) + abs(dest_b[1] - pb[1])
            if trip_a <= trip_b:
                mover, home, dest = int(a), pa, dest_a
            else:
                mover, home, dest = int(b), pb, dest_b
            trip = min(trip_a, trip_b)
            line = math.hypot(dest[0] - home[0], dest[1] - home[1])
            stays = policy.mode == MOVE_ADJACENT_STAY and dest not in occupied
            transports += 1
            hops += trip
            euclid += line
            if stays:
                del occupied[home]
                occupied[dest] = mover
                position[mover] = dest
            else:
                # carried back after the gate
                transports += 1
                hops += trip
                euclid += line
        cum_transports[g] = transports
        cum_hops[g] = hops
        cum_euclid[g] = euclid

    slope, r_squared = _fit_line(cum_transports.astype(np.float64))
    return TransportSimResult(
        n_atoms=n_atoms,
        n_gates=n_gates,
        seed=seed,
        policy=policy,
        cumulative_transports=cum_transports,
        cumulative_hops=cum_hops,
        cumulative_euclidean_cells=cum_euclid,
        transports_per_gate=slope,
        r_squared=r_squared,
    )


def transport_sim_csv(result: TransportSimResult) -> str:
    lines = ["gate_index,cumulative_transports,cumulative_hops,cumulative_euclidean_cells"]
    for g in range(result.n_gates):
        lines.append(
            f"{g + 1},{result.cumulative_transports[g]},"
            f"{result.cumulative_hops[g]},{result.cumulative_euclidean_cells[g]!r}"
        )
    return "\n".join(lines) + "\n"
