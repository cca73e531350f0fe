"""Abstract gate IR, QFT/QPE circuit builders, and a small unitary oracle.

Qubit 0 is the most significant bit of the computational-basis index,
matching the usual top-to-bottom circuit-diagram ordering. The unitary
oracle covers registers of up to four qubits and exists to verify the
builders and the compiler's native-gate decompositions, not to simulate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

#: Oracle capacity; the matrices are dense 2^n x 2^n.
MAX_ORACLE_QUBITS = 4


@dataclass(frozen=True)
class Hadamard:
    qubit: int


@dataclass(frozen=True)
class ControlledRz:
    """diag(1, 1, e^{-i angle/2}, e^{+i angle/2}) on (control, target)."""

    control: int
    target: int
    angle: float


@dataclass(frozen=True)
class CZ:
    qubit_a: int
    qubit_b: int


@dataclass(frozen=True)
class LocalRz:
    qubit: int
    angle: float


@dataclass(frozen=True)
class LocalRPhi:
    """Single-qubit rotation about the xy-plane axis set by axis_angle."""

    qubit: int
    axis_angle: float
    rotation_angle: float


@dataclass(frozen=True)
class GlobalRPhi:
    """xy-plane rotation applied to every qubit by the global drive."""

    axis_angle: float
    rotation_angle: float


@dataclass(frozen=True)
class OpaqueTimed:
    """Externally characterized block known only by per-source on-times.

    ``durations`` maps source ids to seconds. Used for measured circuit
    blocks (e.g. a controlled-U of a phase-estimation run) whose gate-level
    structure is not modeled.
    """

    label: str
    durations: tuple[tuple[str, float], ...]
    qubits: tuple[int, ...] = ()

    @staticmethod
    def from_durations(
        label: str, durations: dict[str, float], qubits: tuple[int, ...] = ()
    ) -> "OpaqueTimed":
        return OpaqueTimed(label, tuple(sorted(durations.items())), qubits)

    def duration_map(self) -> dict[str, float]:
        return dict(self.durations)

    def scaled(self, factor: int, label: str | None = None) -> "OpaqueTimed":
        return OpaqueTimed(
            label if label is not None else self.label,
            tuple((src, dur * factor) for src, dur in self.durations),
            self.qubits,
        )


Gate = Union[Hadamard, ControlledRz, CZ, LocalRz, LocalRPhi, GlobalRPhi, OpaqueTimed]

_KIND_NAMES = {
    Hadamard: "hadamard",
    ControlledRz: "controlled_rz",
    CZ: "cz",
    LocalRz: "local_rz",
    LocalRPhi: "local_rphi",
    GlobalRPhi: "global_rphi",
    OpaqueTimed: "opaque",
}


def gate_kind(gate: Gate) -> str:
    return _KIND_NAMES[type(gate)]


def _gate_qubits(gate: Gate) -> tuple[int, ...]:
    if isinstance(gate, Hadamard):
        return (gate.qubit,)
    if isinstance(gate, ControlledRz):
        return (gate.control, gate.target)
    if isinstance(gate, CZ):
        return (gate.qubit_a, gate.qubit_b)
    if isinstance(gate, (LocalRz, LocalRPhi)):
        return (gate.qubit,)
    if isinstance(gate, GlobalRPhi):
        return ()
    if isinstance(gate, OpaqueTimed):
        return gate.qubits
    raise TypeError(f"not a gate: {gate!r}")


def _gate_angles(gate: Gate) -> tuple[float, ...]:
    if isinstance(gate, (ControlledRz, LocalRz)):
        return (gate.angle,)
    if isinstance(gate, (LocalRPhi, GlobalRPhi)):
        return (gate.axis_angle, gate.rotation_angle)
    return ()


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            qubits = _gate_qubits(gate)
            if len(set(qubits)) != len(qubits):
                raise ValueError(f"gate acts twice on one qubit: {gate!r}")
            for q in qubits:
                if not 0 <= q < self.n_qubits:
                    raise ValueError(
                        f"qubit index {q} out of range for {self.n_qubits} qubits"
                    )
            for angle in _gate_angles(gate):
                if not math.isfinite(angle):
                    raise ValueError(f"non-finite angle in {gate!r}")
            if isinstance(gate, OpaqueTimed):
                for _, duration in gate.durations:
                    if duration < 0 or not math.isfinite(duration):
                        raise ValueError(f"bad duration in {gate!r}")

    def gate_counts(self) -> dict[str, int]:
        """Exact gate counts by kind; kinds absent from the circuit are 0."""
        counts = {name: 0 for name in _KIND_NAMES.values()}
        for gate in self.gates:
            counts[gate_kind(gate)] += 1
        return counts

    def __add__(self, other: "Circuit") -> "Circuit":
        if self.n_qubits != other.n_qubits:
            raise ValueError("cannot concatenate circuits of different widths")
        return Circuit(self.n_qubits, self.gates + other.gates)


def gate_count_summary(circuit: Circuit) -> dict[str, int]:
    """Gate counts by kind; zero entries included for absent kinds."""
    return circuit.gate_counts()


def _negated(gate: Gate) -> Gate:
    if isinstance(gate, ControlledRz):
        return ControlledRz(gate.control, gate.target, -gate.angle)
    if isinstance(gate, LocalRz):
        return LocalRz(gate.qubit, -gate.angle)
    if isinstance(gate, LocalRPhi):
        return LocalRPhi(gate.qubit, gate.axis_angle, -gate.rotation_angle)
    if isinstance(gate, GlobalRPhi):
        return GlobalRPhi(gate.axis_angle, -gate.rotation_angle)
    if isinstance(gate, (Hadamard, CZ)):
        return gate  # self-inverse
    raise ValueError(f"gate has no inverse: {gate!r}")


def inverse_circuit(circuit: Circuit) -> Circuit:
    """Reverse the gate order and negate every rotation angle."""
    return Circuit(circuit.n_qubits, tuple(_negated(g) for g in reversed(circuit.gates)))


def _swap_as_gates(a: int, b: int) -> list[Gate]:
    # SWAP = CX(a,b) CX(b,a) CX(a,b) with CX built from H and CZ; the IR
    # carries no swap kind, so the layer is emitted in native-friendly form.
    def cx(control: int, target: int) -> list[Gate]:
        return [Hadamard(target), CZ(control, target), Hadamard(target)]

    return cx(a, b) + cx(b, a) + cx(a, b)


def build_qft(
    n: int,
    include_final_swaps: bool = False,
    exact_phase_correction: bool = False,
) -> Circuit:
    """QFT circuit: per qubit a Hadamard then controlled rotations.

    Qubit i receives ControlledRz gates of angle pi/2^k controlled by
    qubit i+k, for k = 1 .. n-1-i. ``exact_phase_correction`` adds the
    control-side LocalRz(angle/2) that turns each controlled Rz into a
    controlled phase, which together with ``include_final_swaps`` makes
    the circuit's unitary the textbook DFT matrix. Both default off: the
    cost model counts controlled-Rz gates and no swap network.
    """
    if n < 1:
        raise ValueError("build_qft requires n >= 1")
    gates: list[Gate] = []
    for i in range(n):
        gates.append(Hadamard(i))
        for k in range(1, n - i):
            angle = math.pi / 2.0**k
            gates.append(ControlledRz(i + k, i, angle))
            if exact_phase_correction:
                gates.append(LocalRz(i + k, angle / 2.0))
    if include_final_swaps:
        for i in range(n // 2):
            gates.extend(_swap_as_gates(i, n - 1 - i))
    return Circuit(n, tuple(gates))


def build_inverse_qft(
    n: int,
    include_final_swaps: bool = False,
    exact_phase_correction: bool = False,
) -> Circuit:
    return inverse_circuit(build_qft(n, include_final_swaps, exact_phase_correction))


def build_qpe(
    t: int,
    phase_register: int,
    controlled_u: OpaqueTimed | None,
    exact_phase_correction: bool = False,
) -> Circuit:
    """First-plus-inverse-QFT phase estimation skeleton.

    ``t`` measurement qubits sit on top (indices 0..t-1), the phase
    register below. Controlled-U^(2^j) blocks are instantiated from the
    ``controlled_u`` template by scaling its on-times by 2^j; the template
    models U once, controlled by the last measurement qubit.
    """
    if t < 1:
        raise ValueError("build_qpe requires t >= 1 measurement qubits")
    if phase_register < 1:
        raise ValueError("build_qpe requires a phase register of >= 1 qubits")
    if controlled_u is None:
        raise ValueError("build_qpe requires a controlled-U template")
    n = t + phase_register
    phase_qubits = tuple(range(t, n))
    gates: list[Gate] = [Hadamard(q) for q in range(t)]
    for j in range(t):
        control = t - 1 - j
        reps = 2**j
        label = f"{controlled_u.label}^{reps}"
        block = controlled_u.scaled(reps, label)
        gates.append(
            OpaqueTimed(block.label, block.durations, (control,) + phase_qubits)
        )
    inv = build_inverse_qft(t, exact_phase_correction=exact_phase_correction)
    gates.extend(inv.gates)  # measurement register occupies indices 0..t-1
    return Circuit(n, tuple(gates))


# --- unitary oracle ---------------------------------------------------------


def rphi_matrix(rotation_angle: float, axis_angle: float) -> np.ndarray:
    """Resonant-drive rotation matrix for pulse area ``rotation_angle``."""
    c = math.cos(rotation_angle / 2.0)
    s = math.sin(rotation_angle / 2.0)
    e = np.exp(1j * axis_angle)
    return np.array([[c, -1j * e * s], [-1j * s / e, c]], dtype=complex)


def rz_matrix(angle: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=complex
    )


HADAMARD_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def _embed_one(n: int, qubit: int, u: np.ndarray) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for q in range(n):
        out = np.kron(out, u if q == qubit else np.eye(2, dtype=complex))
    return out


def _bit(index: int, n: int, qubit: int) -> int:
    return (index >> (n - 1 - qubit)) & 1


def _controlled_rz_full(n: int, control: int, target: int, angle: float) -> np.ndarray:
    diag = np.ones(2**n, dtype=complex)
    for idx in range(2**n):
        if _bit(idx, n, control):
            sign = 1.0 if _bit(idx, n, target) else -1.0
            diag[idx] = np.exp(0.5j * sign * angle)
    return np.diag(diag)


def _cz_full(n: int, a: int, b: int) -> np.ndarray:
    diag = np.ones(2**n, dtype=complex)
    for idx in range(2**n):
        if _bit(idx, n, a) and _bit(idx, n, b):
            diag[idx] = -1.0
    return np.diag(diag)


def gate_unitary(gate: Gate, n: int) -> np.ndarray:
    """Full-register matrix of a single gate on an n-qubit register."""
    if isinstance(gate, Hadamard):
        return _embed_one(n, gate.qubit, HADAMARD_MATRIX)
    if isinstance(gate, LocalRz):
        return _embed_one(n, gate.qubit, rz_matrix(gate.angle))
    if isinstance(gate, LocalRPhi):
        return _embed_one(n, gate.qubit, rphi_matrix(gate.rotation_angle, gate.axis_angle))
    if isinstance(gate, GlobalRPhi):
        u = rphi_matrix(gate.rotation_angle, gate.axis_angle)
        out = np.eye(1, dtype=complex)
        for _ in range(n):
            out = np.kron(out, u)
        return out
    if isinstance(gate, ControlledRz):
        return _controlled_rz_full(n, gate.control, gate.target, gate.angle)
    if isinstance(gate, CZ):
        return _cz_full(n, gate.qubit_a, gate.qubit_b)
    if isinstance(gate, OpaqueTimed):
        raise ValueError("opaque timed blocks have no unitary representation")
    raise TypeError(f"not a gate: {gate!r}")


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product of the circuit's gate matrices, first gate applied first."""
    if circuit.n_qubits > MAX_ORACLE_QUBITS:
        raise ValueError(
            f"unitary oracle is limited to {MAX_ORACLE_QUBITS} qubits, "
            f"got {circuit.n_qubits}"
        )
    u = np.eye(2**circuit.n_qubits, dtype=complex)
    for gate in circuit.gates:
        u = gate_unitary(gate, circuit.n_qubits) @ u
    return u


def dft_matrix(n_qubits: int) -> np.ndarray:
    """The 2^n-dim DFT matrix F[j, k] = w^(jk)/sqrt(N), w = exp(2 pi i / N)."""
    dim = 2**n_qubits
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * np.pi * j * k / dim) / math.sqrt(dim)


def distance_up_to_global_phase(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral distance between u and v after optimal phase alignment."""
    trace = np.trace(v.conj().T @ u)
    if abs(trace) < 1e-300:
        return float(np.linalg.norm(u - v, 2))
    phase = trace / abs(trace)
    return float(np.linalg.norm(u - phase * v, 2))


# --- text serialization -----------------------------------------------------
#
# Line-oriented format: first line "qubits N", then one gate per line.
# Angles are radians, durations seconds, qubit indices 0-based.


def circuit_to_text(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    for gate in circuit.gates:
        if isinstance(gate, Hadamard):
            lines.append(f"h {gate.qubit}")
        elif isinstance(gate, ControlledRz):
            lines.append(f"crz {gate.control} {gate.target} {gate.angle!r}")
        elif isinstance(gate, CZ):
            lines.append(f"cz {gate.qubit_a} {gate.qubit_b}")
        elif isinstance(gate, LocalRz):
            lines.append(f"rz {gate.qubit} {gate.angle!r}")
        elif isinstance(gate, LocalRPhi):
            lines.append(
                f"rphi {gate.qubit} {gate.axis_angle!r} {gate.rotation_angle!r}"
            )
        elif isinstance(gate, GlobalRPhi):
            lines.append(f"grphi {gate.axis_angle!r} {gate.rotation_angle!r}")
        elif isinstance(gate, OpaqueTimed):
            qubits = ",".join(str(q) for q in gate.qubits) or "-"
            durs = " ".join(f"{src}={dur!r}" for src, dur in gate.durations)
            lines.append(f"opaque {gate.label} {qubits} {durs}".rstrip())
        else:
            raise TypeError(f"not a gate: {gate!r}")
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str) -> Circuit:
    lines = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    if not lines or not lines[0].startswith("qubits "):
        raise ValueError("circuit text must start with a 'qubits N' line")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad qubits header: {lines[0]!r}") from exc
    gates: list[Gate] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "h":
                gates.append(Hadamard(int(parts[1])))
            elif kind == "crz":
                gates.append(ControlledRz(int(parts[1]), int(parts[2]), float(parts[3])))
            elif kind == "cz":
                gates.append(CZ(int(parts[1]), int(parts[2])))
            elif kind == "rz":
                gates.append(LocalRz(int(parts[1]), float(parts[2])))
            elif kind == "rphi":
                gates.append(LocalRPhi(int(parts[1]), float(parts[2]), float(parts[3])))
            elif kind == "grphi":
                gates.append(GlobalRPhi(float(parts[1]), float(parts[2])))
            elif kind == "opaque":
                label = parts[1]
                qubits = (
                    () if parts[2] == "-" else tuple(int(q) for q in parts[2].split(","))
                )
                durations = {}
                for item in parts[3:]:
                    src, _, dur = item.partition("=")
                    durations[src] = float(dur)
                gates.append(OpaqueTimed.from_durations(label, durations, qubits))
            else:
                raise ValueError(f"unknown gate kind {kind!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}: {exc}") from exc
    return Circuit(n, tuple(gates))
