"""Energy ledgers: converting schedules and runs into joules by source.

A ledger keys joules by (category, source). Categories follow the cost
taxonomy of the model: baseline (traps), preparation (cooling, pumping),
computation (gate pulses), measurement, and transport. The module also
carries the measured per-source on-times of the bundled 4-qubit
phase-estimation run, which the `reproduce` command re-bills.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .circuit import Circuit, Gate, _gate_qubits
from .compiler import (
    AUTO,
    CALIBRATED_SOURCE,
    CalibratedBlock,
    PulseSchedule,
    compile_circuit,
)
from .hwmodel import HardwareProfile
from .layout import grid_side

CATEGORIES = ("baseline", "preparation", "computation", "measurement", "transport")


class EnergyLedger:
    """Non-negative joules keyed by (category, source)."""

    def __init__(self, entries: dict[tuple[str, str], float] | None = None):
        self.entries: dict[tuple[str, str], float] = {}
        if entries:
            for (category, source), joules in entries.items():
                self.add(category, source, joules)

    def add(self, category: str, source: str, joules: float):
        if category not in CATEGORIES:
            raise ValueError(f"unknown ledger category {category!r}")
        if joules < 0 or not math.isfinite(joules):
            raise ValueError(f"ledger entries must be finite and >= 0, got {joules}")
        key = (category, source)
        self.entries[key] = self.entries.get(key, 0.0) + joules

    def get(self, category: str, source: str) -> float:
        return self.entries.get((category, source), 0.0)

    def total(self) -> float:
        return sum(self.entries.values())

    def category_total(self, category: str) -> float:
        return sum(v for (cat, _), v in self.entries.items() if cat == category)

    def scaled(self, factor: float) -> "EnergyLedger":
        if factor < 0:
            raise ValueError("ledger scale factor must be >= 0")
        out = EnergyLedger()
        for (category, source), joules in self.entries.items():
            out.add(category, source, joules * factor)
        return out

    def __add__(self, other: "EnergyLedger") -> "EnergyLedger":
        out = EnergyLedger(dict(self.entries))
        for (category, source), joules in other.entries.items():
            out.add(category, source, joules)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, EnergyLedger) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"EnergyLedger({self.entries!r})"

    def to_nested(self) -> dict[str, dict[str, float]]:
        """category -> source -> joules, categories and sources sorted."""
        nested: dict[str, dict[str, float]] = {}
        for (category, source), joules in sorted(self.entries.items()):
            nested.setdefault(category, {})[source] = joules
        return nested

    @classmethod
    def from_nested(cls, nested: dict[str, dict[str, float]]) -> "EnergyLedger":
        ledger = cls()
        for category, by_source in nested.items():
            for source, joules in by_source.items():
                ledger.add(category, source, joules)
        return ledger

    def to_csv(self) -> str:
        lines = ["category,source,joules"]
        for (category, source), joules in sorted(self.entries.items()):
            lines.append(f"{category},{source},{joules!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MeasuredRun:
    """Per-source on-times of one algorithm execution, plus repetitions."""

    microwave_on_time: float  # s
    laser459_on_time: float  # s
    laser1040_on_time: float  # s
    shots: int = 1

    def __post_init__(self):
        for name in ("microwave_on_time", "laser459_on_time", "laser1040_on_time"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")

    def wall_clock(self) -> float:
        """Microwave pulses are serial; the two lasers overlap (CZ drive)."""
        return self.microwave_on_time + max(
            self.laser459_on_time, self.laser1040_on_time
        )


#: Measured on-times of the molecular-hydrogen phase-estimation run
#: (4 qubits on a 7x7 trap array, repeated 700 times).
H2_QPE_RUN = MeasuredRun(
    microwave_on_time=615.999e-6,
    laser459_on_time=279.581e-6,
    laser1040_on_time=54.454e-6,
    shots=700,
)
H2_QPE_TRAP_COUNT = 49


def schedule_energy(schedule: PulseSchedule, profile: HardwareProfile) -> EnergyLedger:
    """Computation-category energy: source power x on-time per pulse.

    Calibrated blocks contribute their stored energies directly, billed
    under the ``calibrated`` pseudo-source.
    """
    ledger = EnergyLedger()
    for item in schedule.items:
        if isinstance(item, CalibratedBlock):
            ledger.add("computation", CALIBRATED_SOURCE, item.energy)
        else:
            power = profile.sources[item.source_id].power_at_source
            ledger.add("computation", item.source_id, power * item.duration)
    return ledger


def _surroundings(
    profile: HardwareProfile, computation_wall_clock: float, n_traps: int
) -> EnergyLedger:
    """Preparation, measurement and trap baseline for one run."""
    prep = profile.prep
    ledger = EnergyLedger()
    ledger.add("preparation", "cooling", prep.cooling_power * prep.cooling_duration)
    ledger.add("preparation", "pumping", prep.pumping_power * prep.pumping_duration)
    measurement_energy = (
        prep.measurement_beam_count
        * prep.measurement_beam_power
        * prep.measurement_duration
    )
    ledger.add("measurement", "measurement", measurement_energy)
    trap_time = prep.cooling_duration + prep.pumping_duration + computation_wall_clock
    if profile.traps.include_measurement_in_trap_time:
        trap_time += prep.measurement_duration
    trap_power = profile.sources["trap"].power_at_source
    ledger.add("baseline", "trap", n_traps * trap_power * trap_time)
    return ledger


def run_energy(
    circuit: Circuit,
    profile: HardwareProfile,
    shots: int = 1,
    mode: str = AUTO,
    n_traps: int | None = None,
) -> EnergyLedger:
    """Full ledger for executing ``circuit`` ``shots`` times.

    Traps are billed for cooling + pumping + the computation wall clock
    (plus readout when the profile opts in); the trap count defaults to
    the smallest square grid holding the circuit's qubits.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if n_traps is None:
        n_traps = grid_side(circuit.n_qubits) ** 2
    schedule = compile_circuit(circuit, profile, mode)
    per_shot = schedule_energy(schedule, profile) + _surroundings(
        profile, schedule.wall_clock(), n_traps
    )
    return per_shot.scaled(shots)


def reproduce_qpe_experiment(
    measured: MeasuredRun,
    profile: HardwareProfile,
    n_traps: int = H2_QPE_TRAP_COUNT,
) -> tuple[EnergyLedger, dict]:
    """Re-bill a measured run: computation from on-times, rest per profile.

    Returns the full ledger over all shots and a report dict with the
    per-shot computation breakdown and the derived trap-active time.
    """
    per_shot = EnergyLedger()
    on_times = {
        "microwave": measured.microwave_on_time,
        "laser459": measured.laser459_on_time,
        "laser1040": measured.laser1040_on_time,
    }
    for source_id, on_time in on_times.items():
        power = profile.sources[source_id].power_at_source
        per_shot.add("computation", source_id, power * on_time)
    per_shot = per_shot + _surroundings(profile, measured.wall_clock(), n_traps)
    ledger = per_shot.scaled(measured.shots)

    prep = profile.prep
    trap_time = (
        prep.cooling_duration + prep.pumping_duration + measured.wall_clock()
    )
    if profile.traps.include_measurement_in_trap_time:
        trap_time += prep.measurement_duration
    report = {
        "shots": measured.shots,
        "n_traps": n_traps,
        "trap_active_time_s": trap_time,
        "per_shot_computation_j": per_shot.category_total("computation"),
        "computation_total_j": ledger.category_total("computation"),
        "per_source_computation_j": {
            source_id: per_shot.get("computation", source_id)
            for source_id in on_times
        },
        "grand_total_j": ledger.total(),
    }
    return ledger, report


def gate_energy(gate: Gate, profile: HardwareProfile, mode: str = AUTO) -> float:
    """Joules consumed by a single gate under the given compile mode."""
    qubits = _gate_qubits(gate)
    width = max(qubits) + 1 if qubits else 1
    schedule = compile_circuit(Circuit(width, (gate,)), profile, mode)
    return schedule_energy(schedule, profile).total()
