"""Lowering of abstract gates to native gates and native gates to pulses.

Two stages: ``lower_to_native`` rewrites a circuit into the native set
(global xy rotations, local Rz, CZ, opaque blocks); ``compile_circuit``
turns native gates into a timed schedule of pulses on named radiation
sources. All pulses run sequentially except the 459 nm / 1040 nm pair
inside a CZ two-photon pulse, which forms a concurrency group.

Negative rotation angles are realized by inverting the drive phase, so a
pulse duration is always |angle| / Omega and never negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .circuit import (
    CZ,
    Circuit,
    ControlledRz,
    Gate,
    GlobalRPhi,
    Hadamard,
    LocalRPhi,
    LocalRz,
    OpaqueTimed,
)
from .hwmodel import HardwareProfile, ProfileError

FIRST_PRINCIPLES = "first_principles"
CALIBRATED = "calibrated"
AUTO = "auto"

#: Ledger/source key under which calibrated opaque blocks are billed;
#: their measured energies are not attributable to a single source.
CALIBRATED_SOURCE = "calibrated"

PURPOSE_GLOBAL_XY = "global_xy"
PURPOSE_LOCAL_RZ = "local_rz"
PURPOSE_CZ_TWO_PHOTON = "cz_two_photon"
PURPOSE_CZ_CORRECTION = "cz_correction"
PURPOSE_OPAQUE = "opaque"


@dataclass(frozen=True)
class Pulse:
    source_id: str
    duration: float  # s, > 0
    purpose: str
    qubits: tuple[int, ...] = ()


@dataclass(frozen=True)
class CalibratedBlock:
    """Opaque gate block carrying its measured duration and energy."""

    label: str
    duration: float
    energy: float
    qubits: tuple[int, ...] = ()


ScheduleItem = Union[Pulse, CalibratedBlock]
Step = tuple  # tuple[ScheduleItem, ...]: items within a step run concurrently


@dataclass(frozen=True)
class PulseSchedule:
    steps: tuple[Step, ...] = ()

    @property
    def items(self) -> tuple[ScheduleItem, ...]:
        return tuple(item for step in self.steps for item in step)

    @property
    def pulses(self) -> tuple[Pulse, ...]:
        return tuple(item for item in self.items if isinstance(item, Pulse))

    def source_on_times(self) -> dict[str, float]:
        """Total on-time per source; calibrated blocks key 'calibrated'."""
        times: dict[str, float] = {}
        for item in self.items:
            key = item.source_id if isinstance(item, Pulse) else CALIBRATED_SOURCE
            times[key] = times.get(key, 0.0) + item.duration
        return times

    def wall_clock(self) -> float:
        """Elapsed time: steps run back to back, items in a step overlap."""
        return sum(max(item.duration for item in step) for step in self.steps)

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        return PulseSchedule(self.steps + other.steps)


def schedule_duration(schedule: PulseSchedule) -> tuple[dict[str, float], float]:
    """(per-source on-times, wall-clock) of a schedule."""
    return schedule.source_on_times(), schedule.wall_clock()


# --- gate decompositions ----------------------------------------------------


def decompose_local_rotation(
    qubit: int, axis_angle: float, rotation_angle: float
) -> list[Gate]:
    """Local xy rotation as global(+alpha) . Rz . global(-alpha), alpha=pi/2.

    The two global pulses rotate the target axis onto z and back; on every
    other qubit they cancel exactly.
    """
    tilt = axis_angle + math.pi / 2.0
    return [
        GlobalRPhi(tilt, math.pi / 2.0),
        LocalRz(qubit, rotation_angle),
        GlobalRPhi(tilt, -math.pi / 2.0),
    ]


def decompose_hadamard(qubit: int) -> list[Gate]:
    """Hadamard as Rz(pi) followed by a local y rotation of pi/2."""
    return [LocalRz(qubit, math.pi)] + decompose_local_rotation(
        qubit, -math.pi / 2.0, math.pi / 2.0
    )


def decompose_crz(control: int, target: int, angle: float) -> list[Gate]:
    """Controlled Rz from 4 Hadamard, 2 CZ and 3 local Rz on the target."""
    return [
        LocalRz(target, -angle / 2.0),
        Hadamard(target),
        CZ(control, target),
        Hadamard(target),
        LocalRz(target, -angle / 2.0),
        Hadamard(target),
        CZ(control, target),
        Hadamard(target),
        LocalRz(target, angle),
    ]


def lower_to_native(circuit: Circuit) -> Circuit:
    """Rewrite to the native set: GlobalRPhi, LocalRz, CZ, OpaqueTimed."""
    native: list[Gate] = []

    def emit(gate: Gate):
        if isinstance(gate, (GlobalRPhi, LocalRz, CZ, OpaqueTimed)):
            native.append(gate)
        elif isinstance(gate, Hadamard):
            for g in decompose_hadamard(gate.qubit):
                emit(g)
        elif isinstance(gate, LocalRPhi):
            for g in decompose_local_rotation(
                gate.qubit, gate.axis_angle, gate.rotation_angle
            ):
                emit(g)
        elif isinstance(gate, ControlledRz):
            for g in decompose_crz(gate.control, gate.target, gate.angle):
                emit(g)
        else:
            raise TypeError(f"not a gate: {gate!r}")

    for gate in circuit.gates:
        emit(gate)
    return Circuit(circuit.n_qubits, tuple(native))


# --- pulse generation -------------------------------------------------------


def _require_source(profile: HardwareProfile, source_id: str):
    if source_id not in profile.sources:
        raise ProfileError(f"schedule references unknown source {source_id!r}")


def lower_cz(qubit_a: int, qubit_b: int, profile: HardwareProfile) -> list[Step]:
    """CZ protocol: two two-photon pulses plus two local Rz corrections.

    Each two-photon pulse lasts one full oscillation of the blockaded
    double-excitation state, 2*pi / (sqrt(2) * Omega_cz), and drives the
    459 nm and 1040 nm lasers together. The corrections realize
    Rz(-phi01) on each qubit through the Stark-shift laser.
    """
    gates = profile.gates
    two_photon = 2.0 * math.pi / (math.sqrt(2.0) * gates.omega_cz)
    correction = abs(gates.cz_phase_phi01) / gates.omega_rz
    pair = (qubit_a, qubit_b)
    steps: list[Step] = []
    for _ in range(2):
        steps.append(
            (
                Pulse("laser459", two_photon, PURPOSE_CZ_TWO_PHOTON, pair),
                Pulse("laser1040", two_photon, PURPOSE_CZ_TWO_PHOTON, pair),
            )
        )
    for qubit in pair:
        steps.append(
            (Pulse("laser459", correction, PURPOSE_CZ_CORRECTION, (qubit,)),)
        )
    return steps


def _opaque_steps(gate: OpaqueTimed, profile: HardwareProfile) -> list[Step]:
    # The two Rydberg-transition lasers overlap (the 1040 nm only runs
    # inside two-photon pulses where the 459 nm also runs); every other
    # source is serialized.
    durations = {src: dur for src, dur in gate.durations if dur > 0.0}
    for source_id in durations:
        _require_source(profile, source_id)
    steps: list[Step] = []
    laser_pair = [
        Pulse(src, durations.pop(src), PURPOSE_OPAQUE, gate.qubits)
        for src in ("laser459", "laser1040")
        if src in durations
    ]
    for source_id in sorted(durations):
        steps.append(
            (Pulse(source_id, durations[source_id], PURPOSE_OPAQUE, gate.qubits),)
        )
    if laser_pair:
        steps.append(tuple(laser_pair))
    return steps


def resolve_mode(profile: HardwareProfile, mode: str) -> str:
    if mode == AUTO:
        return CALIBRATED if profile.calibration.enabled else FIRST_PRINCIPLES
    if mode not in (FIRST_PRINCIPLES, CALIBRATED):
        raise ValueError(f"unknown compile mode {mode!r}")
    if mode == CALIBRATED and not profile.calibration.enabled:
        raise ProfileError(
            "calibrated mode requested but the profile's calibration "
            "constants are disabled"
        )
    return mode


def compile_circuit(
    circuit: Circuit, profile: HardwareProfile, mode: str = FIRST_PRINCIPLES
) -> PulseSchedule:
    """Lower a circuit to a pulse schedule.

    In calibrated mode, Hadamard and CZ gates (including those produced by
    the controlled-Rz decomposition) become opaque blocks carrying the
    profile's measured per-gate duration and energy; local Rz rotations
    are always priced from the Stark-shift pulse length.
    """
    mode = resolve_mode(profile, mode)
    gates = profile.gates
    for source_id in ("microwave", "laser459", "laser1040"):
        _require_source(profile, source_id)

    steps: list[Step] = []

    def emit(gate: Gate):
        if isinstance(gate, GlobalRPhi):
            if gate.rotation_angle != 0.0:
                duration = abs(gate.rotation_angle) / gates.omega_global
                steps.append((Pulse("microwave", duration, PURPOSE_GLOBAL_XY),))
        elif isinstance(gate, LocalRz):
            if gate.angle != 0.0:
                duration = abs(gate.angle) / gates.omega_rz
                steps.append(
                    (Pulse("laser459", duration, PURPOSE_LOCAL_RZ, (gate.qubit,)),)
                )
        elif isinstance(gate, CZ):
            if mode == CALIBRATED:
                cal = profile.calibration
                steps.append(
                    (
                        CalibratedBlock(
                            "cz", cal.t_cz, cal.e_cz, (gate.qubit_a, gate.qubit_b)
                        ),
                    )
                )
            else:
                steps.extend(lower_cz(gate.qubit_a, gate.qubit_b, profile))
        elif isinstance(gate, Hadamard):
            if mode == CALIBRATED:
                cal = profile.calibration
                steps.append(
                    (CalibratedBlock("hadamard", cal.t_hadamard, cal.e_hadamard, (gate.qubit,)),)
                )
            else:
                for g in decompose_hadamard(gate.qubit):
                    emit(g)
        elif isinstance(gate, LocalRPhi):
            for g in decompose_local_rotation(
                gate.qubit, gate.axis_angle, gate.rotation_angle
            ):
                emit(g)
        elif isinstance(gate, ControlledRz):
            for g in decompose_crz(gate.control, gate.target, gate.angle):
                emit(g)
        elif isinstance(gate, OpaqueTimed):
            steps.extend(_opaque_steps(gate, profile))
        else:
            raise TypeError(f"not a gate: {gate!r}")

    for gate in circuit.gates:
        emit(gate)
    return PulseSchedule(tuple(steps))
