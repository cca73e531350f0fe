"""Hardware parameters of a cesium tweezer-array machine and their file I/O.

Everything the energy model consumes lives here: radiation sources with
their powers and delivery losses, native-gate Rabi frequencies, measured
per-gate calibration constants, trap/transport geometry, preparation and
measurement settings, and an optional microwave-cavity block used to
cross-check the microwave source power against its Rabi frequency.

Profiles are immutable after construction and safe to share across
workers. All quantities are stored in SI; the JSON file schema uses
unit-suffixed keys (``power_mw``, ``duration_ms``, ...) normalized on load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

# Physical constants (CODATA 2018). Fixed table, not profile-configurable,
# so unit drift cannot enter through configuration files.
HBAR = 1.054571817e-34  # J s
MU_0 = 1.25663706212e-6  # N A^-2
MU_B = 9.2740100783e-24  # J T^-1
C_LIGHT = 299792458.0  # m s^-1

LINEAR_FREQUENCY = "linear-frequency"
ANGULAR_FREQUENCY = "angular-frequency"
RABI_CONVENTIONS = (LINEAR_FREQUENCY, ANGULAR_FREQUENCY)

#: Source ids every profile must resolve.
REQUIRED_SOURCE_IDS = (
    "microwave",
    "laser459",
    "laser1040",
    "trap",
    "tweezer",
    "cooling",
    "pumping",
    "measurement",
)

#: Sources whose power/loss are owned by the traps/transport/prep blocks;
#: listing them under ``sources`` in a profile file is a schema error.
DERIVED_SOURCE_IDS = ("trap", "tweezer", "cooling", "pumping", "measurement")


class ProfileError(ValueError):
    """Raised when a hardware profile fails schema or physical validation."""


@dataclass(frozen=True)
class RadiationSource:
    """A radiation source billed at its emitter (wall-plug proxy)."""

    id: str
    power_at_source: float  # W
    loss_fraction: float = 0.0
    description: str = ""

    def __post_init__(self):
        if self.power_at_source <= 0:
            raise ProfileError(
                f"source {self.id!r}: power_at_source must be > 0, "
                f"got {self.power_at_source}"
            )
        if not 0.0 <= self.loss_fraction < 1.0:
            raise ProfileError(
                f"source {self.id!r}: loss_fraction must be in [0, 1), "
                f"got {self.loss_fraction}"
            )

    @property
    def power_at_target(self) -> float:
        """Power delivered to the atoms after source-to-target losses, W."""
        return self.power_at_source * (1.0 - self.loss_fraction)


@dataclass(frozen=True)
class NativeGateParams:
    """Rabi frequencies and phases of the three native gates.

    Quoted Rabi values are stored as given; ``rabi_convention`` states
    whether they are linear frequencies (theta = 2*pi*f*t) or angular
    ones (theta = Omega*t). The ``omega_*`` properties always return
    angular frequencies in rad/s.
    """

    rabi_global: float = 76.5e3  # Hz, global xy rotations (microwave)
    rabi_rz: float = 600e3  # Hz, local Rz via differential Stark shift
    rabi_cz: float = 1.7e6  # Hz, two-photon Rydberg transition
    cz_phase_phi01: float = 1.254  # rad, single-excitation phase per CZ
    cz_detuning_ratio: float = 0.377  # detuning / Rabi for the CZ pulses
    rabi_convention: str = LINEAR_FREQUENCY

    def __post_init__(self):
        for name in ("rabi_global", "rabi_rz", "rabi_cz"):
            if getattr(self, name) <= 0:
                raise ProfileError(f"gates.{name} must be > 0")
        if self.rabi_convention not in RABI_CONVENTIONS:
            raise ProfileError(
                f"gates.rabi_convention must be one of {RABI_CONVENTIONS}, "
                f"got {self.rabi_convention!r}"
            )

    def _angular(self, value: float) -> float:
        if self.rabi_convention == LINEAR_FREQUENCY:
            return 2.0 * math.pi * value
        return value

    @property
    def omega_global(self) -> float:
        return self._angular(self.rabi_global)

    @property
    def omega_rz(self) -> float:
        return self._angular(self.rabi_rz)

    @property
    def omega_cz(self) -> float:
        return self._angular(self.rabi_cz)

    @property
    def cz_phase_phi11(self) -> float:
        """Blockaded double-excitation phase, fixed by the CZ protocol."""
        return 2.0 * self.cz_phase_phi01 - math.pi


@dataclass(frozen=True)
class CalibrationConstants:
    """Measured per-gate durations and energies for Hadamard and CZ.

    These are the values extracted from the reference run of the machine.
    They are not reproducible from the Rabi frequencies above under either
    Rabi convention (the implied mean gate power exceeds every single
    source), so calibrated and first-principles modes are kept separate
    and never mixed silently.
    """

    t_hadamard: float = 25.7693e-6  # s
    e_hadamard: float = 4.98e-6  # J
    t_cz: float = 12.2836e-6  # s
    e_cz: float = 47.3e-6  # J
    enabled: bool = True

    def __post_init__(self):
        if self.enabled:
            for name in ("t_hadamard", "e_hadamard", "t_cz", "e_cz"):
                if getattr(self, name) <= 0:
                    raise ProfileError(f"calibration.{name} must be > 0")


@dataclass(frozen=True)
class TrapParams:
    """Per-trap optical power and grid geometry."""

    power_per_trap_at_source: float = 10e-3  # W (3 mW at the atoms)
    loss_fraction: float = 0.7
    grid_spacing: float = 3e-6  # m
    beam_width: float = 1e-6  # m
    include_measurement_in_trap_time: bool = False

    def __post_init__(self):
        if self.power_per_trap_at_source <= 0:
            raise ProfileError("traps.power_per_trap_at_source must be > 0")
        if not 0.0 <= self.loss_fraction < 1.0:
            raise ProfileError("traps.loss_fraction must be in [0, 1)")
        if not self.grid_spacing > self.beam_width > 0:
            raise ProfileError(
                "traps require grid_spacing > beam_width > 0, got "
                f"{self.grid_spacing} and {self.beam_width}"
            )


@dataclass(frozen=True)
class TransportParams:
    """Tweezer transport speed, power and the transports-per-gate slope."""

    max_speed: float = 0.55  # m/s (0.55 um/us preserves state fidelity)
    tweezer_power: float = 100e-3  # W
    transports_per_gate_slope: float = 1.10

    def __post_init__(self):
        for name in ("max_speed", "tweezer_power", "transports_per_gate_slope"):
            if getattr(self, name) <= 0:
                raise ProfileError(f"transport.{name} must be > 0")


@dataclass(frozen=True)
class PrepMeasureParams:
    """Cooling, optical pumping and fluorescence-readout settings."""

    cooling_power: float = 1e-3  # W
    cooling_duration: float = 100e-3  # s
    pumping_power: float = 1e-3  # W
    pumping_duration: float = 10e-3  # s
    measurement_beam_count: int = 4
    measurement_beam_power: float = 220e-6  # W per beam
    measurement_duration: float = 90e-3  # s
    shots: int = 700

    def __post_init__(self):
        for name in ("cooling_duration", "pumping_duration", "measurement_duration"):
            if getattr(self, name) < 0:
                raise ProfileError(f"prep.{name} must be >= 0")
        for name in ("cooling_power", "pumping_power", "measurement_beam_power"):
            if getattr(self, name) <= 0:
                raise ProfileError(f"prep.{name} must be > 0")
        if self.measurement_beam_count < 1:
            raise ProfileError("prep.measurement_beam_count must be >= 1")
        if self.shots < 1:
            raise ProfileError("prep.shots must be >= 1")


@dataclass(frozen=True)
class MicrowaveCavity:
    """Cylindrical-cavity block relating microwave power to Rabi frequency.

    ``bessel_root`` is ambiguous in the source material (first zero of J1
    at 3.8317 vs. of J1' at 1.8412 for TE11 modes) and ``bessel_integral``
    is never defined there, so both are plain profile parameters. The
    default block is a calibration fixture: its ``bessel_integral`` is
    pinned so that the default global-rotation Rabi frequency maps to the
    57.4 mW the bundled microwave source is billed at.
    """

    transition_angular_frequency: float = 2.0 * math.pi * 9.192631770e9  # rad/s
    cavity_radius: float = 12e-3  # m
    bessel_root: float = 1.8412
    bessel_integral: float = 1.06881125e21

    def __post_init__(self):
        for name in (
            "transition_angular_frequency",
            "cavity_radius",
            "bessel_root",
            "bessel_integral",
        ):
            if getattr(self, name) <= 0:
                raise ProfileError(f"cavity.{name} must be > 0")
        if not self.is_above_cutoff:
            raise ProfileError(
                "cavity is at or below the waveguide cutoff: "
                "transition_angular_frequency * cavity_radius must exceed "
                "c * bessel_root"
            )

    @property
    def is_above_cutoff(self) -> bool:
        return (
            self.transition_angular_frequency * self.cavity_radius
            > C_LIGHT * self.bessel_root
        )


def microwave_power_from_rabi(omega_rabi: float, cavity: MicrowaveCavity) -> float:
    """Microwave power (W) driving Rabi oscillations at ``omega_rabi`` rad/s.

    P = 1/2 * (A_rad / A_dip) * hbar * omega_rabi**2 with
    A_dip = mu_0 * mu_B / (hbar * c) and
    A_rad = (4 I11 / p11) * pi a^2 / sqrt(1 - (c p11 / (omega a))^2).
    """
    if omega_rabi <= 0:
        raise ValueError("omega_rabi must be > 0")
    ratio = (C_LIGHT * cavity.bessel_root) / (
        cavity.transition_angular_frequency * cavity.cavity_radius
    )
    if ratio >= 1.0:
        raise ValueError(
            "cavity operates at or below cutoff: omega * a <= c * p11"
        )
    a_dip = MU_0 * MU_B / (HBAR * C_LIGHT)
    a_rad = (
        (4.0 * cavity.bessel_integral / cavity.bessel_root)
        * math.pi
        * cavity.cavity_radius**2
        / math.sqrt(1.0 - ratio**2)
    )
    return 0.5 * (a_rad / a_dip) * HBAR * omega_rabi**2


@dataclass(frozen=True)
class HardwareProfile:
    """Validated, immutable snapshot of every physical parameter.

    ``sources`` always resolves the eight required ids; the trap, tweezer,
    cooling, pumping and measurement entries mirror the corresponding
    parameter blocks (single source of truth is the block, checked here).
    """

    sources: dict[str, RadiationSource]
    gates: NativeGateParams = field(default_factory=NativeGateParams)
    calibration: CalibrationConstants = field(default_factory=CalibrationConstants)
    traps: TrapParams = field(default_factory=TrapParams)
    transport: TransportParams = field(default_factory=TransportParams)
    prep: PrepMeasureParams = field(default_factory=PrepMeasureParams)
    cavity: MicrowaveCavity | None = field(default_factory=MicrowaveCavity)
    scaling_prep_time: float = 200e-3  # s, per-run constant in scaling sweeps

    def __post_init__(self):
        for source_id in REQUIRED_SOURCE_IDS:
            if source_id not in self.sources:
                raise ProfileError(f"missing required source id: {source_id!r}")
        for source_id, src in self.sources.items():
            if src.id != source_id:
                raise ProfileError(
                    f"source key {source_id!r} does not match its id {src.id!r}"
                )
        if self.scaling_prep_time < 0:
            raise ProfileError("scaling_prep_time must be >= 0")
        mirrored = {
            "trap": self.traps.power_per_trap_at_source,
            "tweezer": self.transport.tweezer_power,
            "cooling": self.prep.cooling_power,
            "pumping": self.prep.pumping_power,
            "measurement": self.prep.measurement_beam_power,
        }
        for source_id, power in mirrored.items():
            if self.sources[source_id].power_at_source != power:
                raise ProfileError(
                    f"source {source_id!r} power disagrees with its parameter "
                    "block; build profiles via HardwareProfile.assemble()"
                )

    @classmethod
    def assemble(
        cls,
        gate_sources: dict[str, RadiationSource] | None = None,
        gates: NativeGateParams | None = None,
        calibration: CalibrationConstants | None = None,
        traps: TrapParams | None = None,
        transport: TransportParams | None = None,
        prep: PrepMeasureParams | None = None,
        cavity: MicrowaveCavity | None = None,
        scaling_prep_time: float = 200e-3,
    ) -> "HardwareProfile":
        """Build a profile, synthesizing the block-owned source entries."""
        gates = gates or NativeGateParams()
        calibration = calibration if calibration is not None else CalibrationConstants()
        traps = traps or TrapParams()
        transport = transport or TransportParams()
        prep = prep or PrepMeasureParams()
        sources = dict(_default_gate_sources())
        if gate_sources:
            for source_id, src in gate_sources.items():
                if source_id in DERIVED_SOURCE_IDS:
                    raise ProfileError(
                        f"source {source_id!r} is configured through its "
                        "parameter block, not the sources map"
                    )
                if source_id not in _default_gate_sources():
                    raise ProfileError(f"unknown source id: {source_id!r}")
                sources[source_id] = src
        sources["trap"] = RadiationSource(
            "trap",
            traps.power_per_trap_at_source,
            traps.loss_fraction,
            "per-trap optical power",
        )
        sources["tweezer"] = RadiationSource(
            "tweezer", transport.tweezer_power, 0.0, "transport tweezer beam"
        )
        sources["cooling"] = RadiationSource(
            "cooling", prep.cooling_power, 0.0, "laser cooling"
        )
        sources["pumping"] = RadiationSource(
            "pumping", prep.pumping_power, 0.0, "optical pumping (initialization)"
        )
        sources["measurement"] = RadiationSource(
            "measurement",
            prep.measurement_beam_power,
            0.0,
            "per-beam fluorescence readout power",
        )
        return cls(
            sources=sources,
            gates=gates,
            calibration=calibration,
            traps=traps,
            transport=transport,
            prep=prep,
            cavity=cavity,
            scaling_prep_time=scaling_prep_time,
        )


def _default_gate_sources() -> dict[str, RadiationSource]:
    return {
        "microwave": RadiationSource(
            "microwave", 57.4e-3, 0.0, "global xy rotations, cylindrical resonator"
        ),
        "laser459": RadiationSource(
            "laser459", 100e-3, 0.5, "459 nm: local Rz and CZ two-photon drive"
        ),
        "laser1040": RadiationSource(
            "laser1040", 11.0, 0.1, "1040 nm: CZ two-photon drive, side illumination"
        ),
    }


def default_profile() -> HardwareProfile:
    """The bundled cesium-array profile with the reference default values.

    Built through the file loader so every quantity is bit-identical to
    what loading an explicit profile file would produce.
    """
    return profile_from_dict({"calibration": {"enabled": True}})


# --- file schema -----------------------------------------------------------
#
# JSON object with optional blocks; omitted blocks fall back to the defaults
# above, except that an omitted ``calibration`` block loads with
# enabled=false (measured constants are machine-specific and must be opted
# into for custom profiles). See README for the full key table.

_MILLI = 1e-3
_MICRO = 1e-6


def _take(block: dict, key: str, scale: float, default: float) -> float:
    """Pop ``key`` and normalize to SI; ``default`` is in the key's unit.

    Defaults take the same value * scale path as explicit entries so that
    loaded profiles are bit-stable under serialize/load round-trips.
    """
    if key in block:
        value = block.pop(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ProfileError(f"{key} must be a number")
        return float(value) * scale
    return default * scale


def _reject_unknown(block: dict, context: str):
    if block:
        raise ProfileError(f"unknown keys in {context}: {sorted(block)}")


def _parse_source(source_id: str, raw: dict) -> RadiationSource:
    block = dict(raw)
    power = _take(block, "power_mw", _MILLI, None)
    if power is None:
        raise ProfileError(f"source {source_id!r}: power_mw is required")
    loss = _take(block, "loss_fraction", 1.0, 0.0)
    description = block.pop("description", "")
    _reject_unknown(block, f"sources.{source_id}")
    return RadiationSource(source_id, power, loss, str(description))


def load_profile(path: str | Path) -> HardwareProfile:
    """Load and validate a hardware profile from a JSON file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ProfileError(f"cannot read profile {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProfileError(f"profile {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ProfileError("profile file must contain a JSON object")
    return profile_from_dict(raw)


def profile_from_dict(raw: dict) -> HardwareProfile:
    data = dict(raw)

    gate_sources: dict[str, RadiationSource] = {}
    for source_id, src_raw in dict(data.pop("sources", {})).items():
        if source_id in DERIVED_SOURCE_IDS:
            raise ProfileError(
                f"source {source_id!r} is configured through the traps/"
                "transport/prep blocks, not the sources map"
            )
        if source_id not in _default_gate_sources():
            raise ProfileError(f"unknown source id: {source_id!r}")
        gate_sources[source_id] = _parse_source(source_id, src_raw)

    block = dict(data.pop("gates", {}))
    gates = NativeGateParams(
        rabi_global=_take(block, "rabi_global_khz", 1e3, 76.5),
        rabi_rz=_take(block, "rabi_rz_khz", 1e3, 600.0),
        rabi_cz=_take(block, "rabi_cz_khz", 1e3, 1700.0),
        cz_phase_phi01=_take(block, "cz_phase_phi01_rad", 1.0, 1.254),
        cz_detuning_ratio=_take(block, "cz_detuning_ratio", 1.0, 0.377),
        rabi_convention=block.pop("rabi_convention", LINEAR_FREQUENCY),
    )
    _reject_unknown(block, "gates")

    if "calibration" in data:
        block = dict(data.pop("calibration"))
        enabled = bool(block.pop("enabled", True))
        calibration = CalibrationConstants(
            t_hadamard=_take(block, "t_hadamard_us", _MICRO, 25.7693),
            e_hadamard=_take(block, "e_hadamard_uj", _MICRO, 4.98),
            t_cz=_take(block, "t_cz_us", _MICRO, 12.2836),
            e_cz=_take(block, "e_cz_uj", _MICRO, 47.3),
            enabled=enabled,
        )
        _reject_unknown(block, "calibration")
    else:
        calibration = CalibrationConstants(
            t_hadamard=25.7693 * _MICRO,
            e_hadamard=4.98 * _MICRO,
            t_cz=12.2836 * _MICRO,
            e_cz=47.3 * _MICRO,
            enabled=False,
        )

    block = dict(data.pop("traps", {}))
    traps = TrapParams(
        power_per_trap_at_source=_take(block, "power_per_trap_mw", _MILLI, 10.0),
        loss_fraction=_take(block, "loss_fraction", 1.0, 0.7),
        grid_spacing=_take(block, "grid_spacing_um", _MICRO, 3.0),
        beam_width=_take(block, "beam_width_um", _MICRO, 1.0),
        include_measurement_in_trap_time=bool(
            block.pop("include_measurement_in_trap_time", False)
        ),
    )
    _reject_unknown(block, "traps")

    block = dict(data.pop("transport", {}))
    transport = TransportParams(
        # 1 um/us == 1 m/s, so the suffix carries no numeric scale
        max_speed=_take(block, "max_speed_um_per_us", 1.0, 0.55),
        tweezer_power=_take(block, "tweezer_power_mw", _MILLI, 100.0),
        transports_per_gate_slope=_take(
            block, "transports_per_gate_slope", 1.0, 1.10
        ),
    )
    _reject_unknown(block, "transport")

    block = dict(data.pop("prep", {}))
    shots = block.pop("shots", 700)
    if not isinstance(shots, int) or isinstance(shots, bool):
        raise ProfileError("prep.shots must be an integer")
    beams = block.pop("measurement_beam_count", 4)
    if not isinstance(beams, int) or isinstance(beams, bool):
        raise ProfileError("prep.measurement_beam_count must be an integer")
    prep = PrepMeasureParams(
        cooling_power=_take(block, "cooling_power_mw", _MILLI, 1.0),
        cooling_duration=_take(block, "cooling_duration_ms", _MILLI, 100.0),
        pumping_power=_take(block, "pumping_power_mw", _MILLI, 1.0),
        pumping_duration=_take(block, "pumping_duration_ms", _MILLI, 10.0),
        measurement_beam_count=beams,
        measurement_beam_power=_take(block, "measurement_beam_power_uw", _MICRO, 220.0),
        measurement_duration=_take(block, "measurement_duration_ms", _MILLI, 90.0),
        shots=shots,
    )
    _reject_unknown(block, "prep")

    raw_cavity = data.pop("cavity", {})
    if raw_cavity is None:
        cavity = None
    else:
        block = dict(raw_cavity)
        cavity = MicrowaveCavity(
            transition_angular_frequency=2.0
            * math.pi
            * _take(block, "transition_frequency_ghz", 1e9, 9.19263177),
            cavity_radius=_take(block, "radius_mm", _MILLI, 12.0),
            bessel_root=_take(block, "bessel_root", 1.0, 1.8412),
            bessel_integral=_take(block, "bessel_integral", 1.0, 1.06881125e21),
        )
        _reject_unknown(block, "cavity")

    scaling_prep_time = _take(data, "scaling_prep_time_ms", _MILLI, 200.0)
    _reject_unknown(data, "profile")

    return HardwareProfile.assemble(
        gate_sources=gate_sources,
        gates=gates,
        calibration=calibration,
        traps=traps,
        transport=transport,
        prep=prep,
        cavity=cavity,
        scaling_prep_time=scaling_prep_time,
    )


def profile_to_dict(profile: HardwareProfile) -> dict:
    """Serialize a profile to its file schema (inverse of load_profile)."""
    gates = profile.gates
    calibration = profile.calibration
    traps = profile.traps
    transport = profile.transport
    prep = profile.prep
    out: dict = {
        "sources": {
            source_id: {
                "power_mw": profile.sources[source_id].power_at_source / _MILLI,
                "loss_fraction": profile.sources[source_id].loss_fraction,
                "description": profile.sources[source_id].description,
            }
            for source_id in ("microwave", "laser459", "laser1040")
        },
        "gates": {
            "rabi_global_khz": gates.rabi_global / 1e3,
            "rabi_rz_khz": gates.rabi_rz / 1e3,
            "rabi_cz_khz": gates.rabi_cz / 1e3,
            "cz_phase_phi01_rad": gates.cz_phase_phi01,
            "cz_detuning_ratio": gates.cz_detuning_ratio,
            "rabi_convention": gates.rabi_convention,
        },
        "calibration": {
            "enabled": calibration.enabled,
            "t_hadamard_us": calibration.t_hadamard / _MICRO,
            "e_hadamard_uj": calibration.e_hadamard / _MICRO,
            "t_cz_us": calibration.t_cz / _MICRO,
            "e_cz_uj": calibration.e_cz / _MICRO,
        },
        "traps": {
            "power_per_trap_mw": traps.power_per_trap_at_source / _MILLI,
            "loss_fraction": traps.loss_fraction,
            "grid_spacing_um": traps.grid_spacing / _MICRO,
            "beam_width_um": traps.beam_width / _MICRO,
            "include_measurement_in_trap_time": traps.include_measurement_in_trap_time,
        },
        "transport": {
            "max_speed_um_per_us": transport.max_speed,
            "tweezer_power_mw": transport.tweezer_power / _MILLI,
            "transports_per_gate_slope": transport.transports_per_gate_slope,
        },
        "prep": {
            "cooling_power_mw": prep.cooling_power / _MILLI,
            "cooling_duration_ms": prep.cooling_duration / _MILLI,
            "pumping_power_mw": prep.pumping_power / _MILLI,
            "pumping_duration_ms": prep.pumping_duration / _MILLI,
            "measurement_beam_count": prep.measurement_beam_count,
            "measurement_beam_power_uw": prep.measurement_beam_power / _MICRO,
            "measurement_duration_ms": prep.measurement_duration / _MILLI,
            "shots": prep.shots,
        },
        "scaling_prep_time_ms": profile.scaling_prep_time / _MILLI,
    }
    if profile.cavity is not None:
        out["cavity"] = {
            "transition_frequency_ghz": profile.cavity.transition_angular_frequency
            / (2.0 * math.pi * 1e9),
            "radius_mm": profile.cavity.cavity_radius / _MILLI,
            "bessel_root": profile.cavity.bessel_root,
            "bessel_integral": profile.cavity.bessel_integral,
        }
    return out


def save_profile(profile: HardwareProfile, path: str | Path):
    Path(path).write_text(json.dumps(profile_to_dict(profile), indent=2) + "\n")
