"""Circuit builders, gate counting, the unitary oracle, and text I/O."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydenergy.circuit import (
    CZ,
    Circuit,
    ControlledRz,
    GlobalRPhi,
    Hadamard,
    LocalRPhi,
    LocalRz,
    OpaqueTimed,
    build_inverse_qft,
    build_qft,
    build_qpe,
    circuit_from_text,
    circuit_to_text,
    circuit_unitary,
    distance_up_to_global_phase,
    gate_count_summary,
    rphi_matrix,
)


def reference_dft(n_qubits: int) -> np.ndarray:
    """Independent DFT construction: F[j,k] = w^(jk)/sqrt(N), w=exp(2 pi i/N)."""
    dim = 2**n_qubits
    w = np.exp(2j * np.pi / dim)
    return np.array(
        [[w ** (j * k) for k in range(dim)] for j in range(dim)], dtype=complex
    ) / math.sqrt(dim)


class TestBuildQft:
    def test_single_qubit_is_one_hadamard(self):
        circuit = build_qft(1)
        assert circuit.gates == (Hadamard(0),)

    def test_three_qubits_matches_reference_layout(self):
        circuit = build_qft(3)
        assert circuit.gates == (
            Hadamard(0),
            ControlledRz(1, 0, math.pi / 2),
            ControlledRz(2, 0, math.pi / 4),
            Hadamard(1),
            ControlledRz(2, 1, math.pi / 2),
            Hadamard(2),
        )

    def test_five_qubit_gate_counts(self):
        counts = gate_count_summary(build_qft(5))
        assert counts["hadamard"] == 5
        assert counts["controlled_rz"] == 10  # n(n-1)/2

    @pytest.mark.parametrize("n", range(1, 12))
    def test_count_formula_holds(self, n):
        counts = build_qft(n).gate_counts()
        assert counts["hadamard"] == n
        assert counts["controlled_rz"] == n * (n - 1) // 2

    def test_zero_qubits_rejected(self):
        with pytest.raises(ValueError):
            build_qft(0)

    def test_swap_layer_only_when_flagged(self):
        plain = build_qft(3)
        swapped = build_qft(3, include_final_swaps=True)
        assert plain.gate_counts()["cz"] == 0
        assert swapped.gate_counts()["cz"] == 3  # one swap pair -> 3 CZ


class TestInverseQft:
    def test_single_qubit_self_inverse(self):
        assert build_inverse_qft(1).gates == (Hadamard(0),)

    @pytest.mark.parametrize("n", [2, 3])
    def test_inverse_composition_is_identity(self, n):
        composed = build_qft(n) + build_inverse_qft(n)
        u = circuit_unitary(composed)
        assert distance_up_to_global_phase(u, np.eye(2**n)) < 1e-12


class TestBuildQpe:
    def template(self):
        return OpaqueTimed.from_durations(
            "cu", {"microwave": 1e-6, "laser459": 2e-6}
        )

    def test_first_experiment_layout(self):
        circuit = build_qpe(2, 1, self.template())
        assert circuit.n_qubits == 3
        counts = circuit.gate_counts()
        assert counts["opaque"] == 2

    def test_h2_experiment_layout(self):
        circuit = build_qpe(3, 1, self.template())
        assert circuit.n_qubits == 4
        assert circuit.gate_counts()["opaque"] == 3

    def test_structure_hadamards_blocks_then_inverse_qft(self):
        circuit = build_qpe(2, 1, self.template())
        counts = circuit.gate_counts()
        # 2 register Hadamards + the inverse QFT's own 2
        assert counts["hadamard"] == 4
        assert counts["controlled_rz"] == 1

    def test_powers_of_two_scale_the_template_durations(self):
        circuit = build_qpe(3, 1, self.template())
        blocks = [g for g in circuit.gates if isinstance(g, OpaqueTimed)]
        totals = [sum(d for _, d in b.durations) for b in blocks]
        assert totals == [pytest.approx(3e-6), pytest.approx(6e-6), pytest.approx(12e-6)]
        # the earliest block is controlled by the last measurement qubit
        assert blocks[0].qubits[0] == 2
        assert blocks[2].qubits[0] == 0

    def test_missing_template_rejected(self):
        with pytest.raises(ValueError):
            build_qpe(2, 1, None)


class TestUnitaryOracle:
    def test_empty_circuit_is_identity(self):
        u = circuit_unitary(Circuit(2))
        assert np.allclose(u, np.eye(4))

    def test_rotation_matrix_half_turn(self):
        target = np.array([[0, -1j], [-1j, 0]])
        assert distance_up_to_global_phase(rphi_matrix(math.pi, 0.0), target) < 1e-12
        # and exactly, not only up to phase
        assert np.allclose(rphi_matrix(math.pi, 0.0), target, atol=1e-12)

    def test_qft2_with_corrections_is_dft(self):
        circuit = build_qft(2, include_final_swaps=True, exact_phase_correction=True)
        u = circuit_unitary(circuit)
        assert distance_up_to_global_phase(u, reference_dft(2)) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_qftn_with_corrections_is_dft(self, n):
        circuit = build_qft(n, include_final_swaps=True, exact_phase_correction=True)
        u = circuit_unitary(circuit)
        assert distance_up_to_global_phase(u, reference_dft(n)) < 1e-12

    def test_controlled_rz_matrix_convention(self):
        u = circuit_unitary(Circuit(2, (ControlledRz(0, 1, 0.7),)))
        expected = np.diag([1, 1, np.exp(-0.35j), np.exp(0.35j)])
        assert np.allclose(u, expected)

    def test_cz_matrix(self):
        u = circuit_unitary(Circuit(2, (CZ(0, 1),)))
        assert np.allclose(u, np.diag([1, 1, 1, -1]))

    def test_controlled_rz_cancels_its_negation(self):
        circuit = Circuit(2, (ControlledRz(0, 1, 1.234), ControlledRz(0, 1, -1.234)))
        assert distance_up_to_global_phase(circuit_unitary(circuit), np.eye(4)) < 1e-12

    def test_capacity_error_beyond_four_qubits(self):
        with pytest.raises(ValueError, match="limited"):
            circuit_unitary(Circuit(5, (Hadamard(0),)))

    def test_opaque_blocks_unsupported(self):
        block = OpaqueTimed.from_durations("u", {"microwave": 1e-6})
        with pytest.raises(ValueError, match="opaque"):
            circuit_unitary(Circuit(1, (block,)))

    @settings(max_examples=25, deadline=None)
    @given(data=st.data(), n=st.integers(1, 3))
    def test_random_circuits_are_unitary(self, data, n):
        gates = []
        for _ in range(data.draw(st.integers(0, 6))):
            kind = data.draw(st.sampled_from(["h", "crz", "cz", "rz", "rphi", "grphi"]))
            q = data.draw(st.integers(0, n - 1))
            angle = data.draw(st.floats(-6.3, 6.3))
            if kind == "h":
                gates.append(Hadamard(q))
            elif kind == "rz":
                gates.append(LocalRz(q, angle))
            elif kind == "rphi":
                gates.append(LocalRPhi(q, data.draw(st.floats(-3.2, 3.2)), angle))
            elif kind == "grphi":
                gates.append(GlobalRPhi(data.draw(st.floats(-3.2, 3.2)), angle))
            elif n >= 2:
                q2 = data.draw(st.integers(0, n - 1).filter(lambda x: x != q))
                gates.append(CZ(q, q2) if kind == "cz" else ControlledRz(q, q2, angle))
        u = circuit_unitary(Circuit(n, tuple(gates)))
        assert np.allclose(u @ u.conj().T, np.eye(2**n), atol=1e-10)


class TestGateCounts:
    def test_qft4(self):
        counts = gate_count_summary(build_qft(4))
        assert counts["hadamard"] == 4
        assert counts["controlled_rz"] == 6

    def test_empty_circuit_all_zero(self):
        assert all(v == 0 for v in Circuit(1).gate_counts().values())

    def test_qpe_counts(self):
        template = OpaqueTimed.from_durations("cu", {"microwave": 1e-6})
        counts = build_qpe(2, 1, template).gate_counts()
        assert counts["opaque"] == 2
        assert counts["hadamard"] == 2 + 2  # register layer + inverse QFT


class TestValidation:
    def test_duplicate_qubits_rejected(self):
        with pytest.raises(ValueError):
            Circuit(2, (CZ(1, 1),))

    def test_out_of_range_index_rejected(self):
        with pytest.raises(ValueError):
            Circuit(2, (Hadamard(2),))

    def test_nonfinite_angle_rejected(self):
        with pytest.raises(ValueError):
            Circuit(1, (LocalRz(0, math.inf),))


class TestTextFormat:
    def test_round_trip(self):
        circuit = Circuit(
            3,
            (
                Hadamard(0),
                ControlledRz(1, 0, math.pi / 2),
                CZ(0, 2),
                LocalRz(2, -0.25),
                LocalRPhi(1, 0.5, 1.5),
                GlobalRPhi(0.0, math.pi),
                OpaqueTimed.from_durations(
                    "cu^2", {"microwave": 1e-6, "laser459": 2e-6}, (0, 2)
                ),
            ),
        )
        assert circuit_from_text(circuit_to_text(circuit)) == circuit

    def test_builder_round_trip(self):
        for n in (1, 3, 5):
            circuit = build_qft(n)
            assert circuit_from_text(circuit_to_text(circuit)) == circuit

    def test_missing_header_rejected(self):
        with pytest.raises(ValueError, match="qubits"):
            circuit_from_text("h 0\n")

    def test_unknown_gate_rejected(self):
        with pytest.raises(ValueError, match="unknown gate"):
            circuit_from_text("qubits 1\nfoo 0\n")

    def test_bad_field_reports_line(self):
        with pytest.raises(ValueError, match="line 2"):
            circuit_from_text("qubits 1\nrz zero 1.0\n")
