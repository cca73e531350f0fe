"""rydenergy: energy and resource estimation for tweezer-array quantum computers.

Compiles QFT/QPE circuits to the native gate set of a cesium atom array,
bills pulse schedules into per-source energy ledgers, extrapolates QFT
energy scaling to arbitrary qubit counts, and locates the energy
crossover against classical supercomputers running the FFT.
"""

from .circuit import (
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
    gate_count_summary,
)
from .classical import (
    EL_CAPITAN,
    JEDI,
    ClassicalMachine,
    fft_energy,
    find_crossover,
    load_catalog,
)
from .compiler import (
    CALIBRATED,
    FIRST_PRINCIPLES,
    PulseSchedule,
    compile_circuit,
    lower_to_native,
    schedule_duration,
)
from .energetics import (
    H2_QPE_RUN,
    EnergyLedger,
    MeasuredRun,
    gate_energy,
    reproduce_qpe_experiment,
    run_energy,
    schedule_energy,
)
from .hwmodel import (
    HardwareProfile,
    ProfileError,
    default_profile,
    load_profile,
    microwave_power_from_rabi,
    save_profile,
)
from .layout import (
    GridLayout,
    TransportPolicy,
    mean_pair_distance,
    simulate_transports,
    single_hop_cost,
    transport_energy_analytic,
)
from .scaling import (
    ScalingCurve,
    build_curve,
    crz_energy,
    fit_exponent,
    qft_gate_energy,
    qft_time,
    total_quantum_energy,
    traps_energy,
)

__version__ = "0.1.0"
