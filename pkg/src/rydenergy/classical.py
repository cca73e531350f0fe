"""Classical supercomputer energy model and the quantum crossover finder.

A machine is characterized by its joules per elementary bit operation,
either given directly or derived as power / performance / bit-ops-per-flop.
The FFT on n bits is billed n * 2^n bit operations, so the classical
energy is exponential in n and any polynomially scaling quantum platform
eventually undercuts it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .hwmodel import HardwareProfile
from .scaling import CALIBRATED, total_quantum_energy


@dataclass(frozen=True)
class ClassicalMachine:
    name: str
    performance: float | None = None  # flop/s
    power: float | None = None  # W
    bitops_per_flop: float = 1000.0
    direct_joules_per_bitop: float | None = None

    def __post_init__(self):
        if self.direct_joules_per_bitop is None:
            if self.performance is None or self.power is None:
                raise ValueError(
                    f"machine {self.name!r}: needs performance and power, or a "
                    "direct joules_per_bitop"
                )
            if self.performance <= 0 or self.power <= 0:
                raise ValueError(f"machine {self.name!r}: performance and power must be > 0")
        if self.bitops_per_flop <= 0:
            raise ValueError(f"machine {self.name!r}: bitops_per_flop must be > 0")
        if self.direct_joules_per_bitop is not None and self.direct_joules_per_bitop < 0:
            raise ValueError(f"machine {self.name!r}: joules_per_bitop must be >= 0")

    @property
    def joules_per_bitop(self) -> float:
        if self.direct_joules_per_bitop is not None:
            return self.direct_joules_per_bitop
        return self.power / self.performance / self.bitops_per_flop


#: Top-of-the-ranking machine: 1809.00 PFlop/s at 29685 kW.
EL_CAPITAN = ClassicalMachine("elcapitan", performance=1809.00e15, power=29685e3)
#: Highly energy-efficient entry, pinned by its derived J/bit-op only.
JEDI = ClassicalMachine("jedi", direct_joules_per_bitop=1.37e-14)

BUILTIN_CATALOG: dict[str, ClassicalMachine] = {
    machine.name: machine for machine in (EL_CAPITAN, JEDI)
}


def load_catalog(path: str | Path) -> dict[str, ClassicalMachine]:
    """Read a machine catalog (JSON list) and merge it over the builtins.

    Entries carry either pflops + power_kw (+ optional bitops_per_flop)
    or a direct joules_per_bitop.
    """
    entries = json.loads(Path(path).read_text())
    if not isinstance(entries, list):
        raise ValueError("machine catalog must be a JSON list")
    catalog = dict(BUILTIN_CATALOG)
    for raw in entries:
        name = raw.get("name")
        if not name:
            raise ValueError("catalog entry without a name")
        catalog[name] = ClassicalMachine(
            name=name,
            performance=raw["pflops"] * 1e15 if "pflops" in raw else None,
            power=raw["power_kw"] * 1e3 if "power_kw" in raw else None,
            bitops_per_flop=float(raw.get("bitops_per_flop", 1000.0)),
            direct_joules_per_bitop=raw.get("joules_per_bitop"),
        )
    return catalog


def joules_per_bitop(machine: ClassicalMachine) -> float:
    return machine.joules_per_bitop


def fft_energy(machine: ClassicalMachine, n: int) -> float:
    """Energy to run an n-bit FFT: J/bit-op x n 2^n gate count."""
    if n < 1:
        raise ValueError("fft_energy requires n >= 1")
    return machine.joules_per_bitop * n * 2.0**n


def find_crossover(
    profile: HardwareProfile,
    machine: ClassicalMachine,
    n_max: int,
    mode: str = CALIBRATED,
) -> int | None:
    """Smallest n <= n_max where the quantum total beats the classical FFT.

    Scans upward with strict inequality on the full quantum total
    (including the constant preparation/measurement floor); returns None
    when no crossover exists below n_max.
    """
    if n_max < 2:
        raise ValueError("find_crossover requires n_max >= 2")
    for n in range(1, n_max + 1):
        quantum = total_quantum_energy(n, profile, mode).e_total
        if quantum < fft_energy(machine, n):
            return n
    return None
