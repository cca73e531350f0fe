"""Command-line interface: estimation, reproduction, scaling and comparison.

Exit codes are a stable contract: 0 success, 1 value mismatch against the
pinned reference tables, 2 usage or input error, 3 profile error. All
randomness is seeded (fixed default, printed in outputs); repeated
invocations with identical inputs produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .circuit import Circuit, OpaqueTimed, build_qft, build_qpe, circuit_from_text, circuit_to_text
from .classical import BUILTIN_CATALOG, fft_energy, load_catalog
from .compiler import AUTO, CALIBRATED, FIRST_PRINCIPLES, compile_circuit
from .energetics import (
    H2_QPE_RUN,
    H2_QPE_TRAP_COUNT,
    EnergyLedger,
    MeasuredRun,
    reproduce_qpe_experiment,
    run_energy,
)
from .hwmodel import HardwareProfile, ProfileError, default_profile, load_profile
from .layout import (
    DEFAULT_SEED,
    TransportPolicy,
    simulate_transports,
    transport_sim_csv,
)
from .scaling import (
    build_curve,
    closed_form_report,
    fit_exponent,
    logspace_counts,
    total_quantum_energy,
)

PROFILE_ENV_VAR = "RYDENERGY_PROFILE"

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_PROFILE = 3

MODES = (AUTO, CALIBRATED, FIRST_PRINCIPLES)


def _load_active_profile(args) -> HardwareProfile:
    path = args.profile or os.environ.get(PROFILE_ENV_VAR)
    if path:
        return load_profile(path)
    return default_profile()


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_circuit_spec(spec: str, seed: int) -> Circuit | MeasuredRun:
    """qft:N and qpe:N builders, qpe:h2 measured run, or a circuit file."""
    if spec == "qpe:h2":
        return H2_QPE_RUN
    if spec.startswith("qft:"):
        return build_qft(int(spec.split(":", 1)[1]))
    if spec.startswith("qpe:"):
        t = int(spec.split(":", 1)[1])
        template = OpaqueTimed.from_durations("controlled_u", {})
        return build_qpe(t, 1, template)
    path = Path(spec)
    if not path.exists():
        raise ValueError(
            f"circuit spec {spec!r} is neither a builtin (qft:N, qpe:N, "
            "qpe:h2) nor an existing file"
        )
    return circuit_from_text(path.read_text())


def _ledger_table(ledger: EnergyLedger, title: str = "") -> str:
    lines = []
    if title:
        lines.append(title)
    lines.append(f"{'category':<14}{'source':<14}{'energy_J':>14}")
    for (category, source), joules in sorted(ledger.entries.items()):
        lines.append(f"{category:<14}{source:<14}{joules:>14.6g}")
    lines.append(f"{'total':<28}{ledger.total():>14.6g}")
    return "\n".join(lines) + "\n"


def cmd_estimate(args) -> int:
    profile = _load_active_profile(args)
    resolved = _resolve_circuit_spec(args.circuit, args.seed)
    if isinstance(resolved, MeasuredRun):
        shots = args.shots if args.shots is not None else resolved.shots
        measured = MeasuredRun(
            resolved.microwave_on_time,
            resolved.laser459_on_time,
            resolved.laser1040_on_time,
            shots,
        )
        ledger, report = reproduce_qpe_experiment(
            measured, profile, args.n_traps or H2_QPE_TRAP_COUNT
        )
        meta = {"circuit": args.circuit, "measured": True, **report}
    else:
        if args.measured:
            raise ValueError(
                "--measured applies only to qpe:h2; no measured on-times "
                f"exist for {args.circuit!r}"
            )
        shots = args.shots if args.shots is not None else 1
        ledger = run_energy(
            resolved, profile, shots=shots, mode=args.mode, n_traps=args.n_traps
        )
        meta = {"circuit": args.circuit, "measured": False, "shots": shots}
    if args.format == "json":
        _emit(
            args,
            json.dumps(
                {**meta, "total_j": ledger.total(), "ledger": ledger.to_nested()},
                indent=2,
            )
            + "\n",
        )
    elif args.format == "csv":
        _emit(args, ledger.to_csv())
    else:
        _emit(args, _ledger_table(ledger, f"energy ledger for {args.circuit}"))
    return EXIT_OK


def cmd_compile(args) -> int:
    profile = _load_active_profile(args)
    resolved = _resolve_circuit_spec(args.circuit, args.seed)
    if isinstance(resolved, MeasuredRun):
        raise ValueError("qpe:h2 is a measured run; there is no circuit to compile")
    schedule = compile_circuit(resolved, profile, args.mode)
    on_times = schedule.source_on_times()
    wall = schedule.wall_clock()
    if args.format == "json":
        _emit(
            args,
            json.dumps(
                {
                    "circuit": args.circuit,
                    "n_items": len(schedule.items),
                    "source_on_times_s": dict(sorted(on_times.items())),
                    "wall_clock_s": wall,
                },
                indent=2,
            )
            + "\n",
        )
    elif args.format == "csv":
        lines = ["key,seconds"]
        for source, seconds in sorted(on_times.items()):
            lines.append(f"{source},{seconds!r}")
        lines.append(f"wall_clock,{wall!r}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        lines = [f"schedule for {args.circuit} ({len(schedule.items)} items)"]
        for source, seconds in sorted(on_times.items()):
            lines.append(f"  {source:<14}{seconds:>14.6g} s")
        lines.append(f"  {'wall clock':<14}{wall:>14.6g} s")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _check_cell(label: str, computed: float, expected: str, deviations: list[str]) -> str:
    decimals = len(expected.split(".")[1]) if "." in expected else 0
    if abs(computed - float(expected)) > 0.5 * 10.0 ** (-decimals):
        deviations.append(
            f"{label}: computed {computed:.{decimals + 3}f}, expected {expected}"
        )
    return f"{computed:.{decimals}f}"


def _reproduce_computation(profile, deviations: list[str]) -> list[str]:
    run = H2_QPE_RUN
    rows = [
        ("microwave", run.microwave_on_time, "0.035"),
        ("laser459", run.laser459_on_time, "0.028"),
        ("laser1040", run.laser1040_on_time, "0.599"),
    ]
    lines = [
        "computation (per shot)",
        f"{'source':<14}{'time_us':>10}{'power_mW':>10}{'energy_mJ':>12}",
    ]
    total_mj = 0.0
    for source_id, on_time, expected in rows:
        power = profile.sources[source_id].power_at_source
        energy_mj = power * on_time * 1e3
        total_mj += energy_mj
        cell = _check_cell(f"computation.{source_id}.energy_mJ", energy_mj, expected, deviations)
        lines.append(
            f"{source_id:<14}{on_time * 1e6:>10.3f}{power * 1e3:>10.6g}{cell:>12}"
        )
    cell = _check_cell("computation.total_mJ", total_mj, "0.662", deviations)
    lines.append(f"{'total':<34}{cell:>12}")
    return lines


def _reproduce_baseline(profile, deviations: list[str]) -> list[str]:
    prep = profile.prep
    trap_time = prep.cooling_duration + prep.pumping_duration + H2_QPE_RUN.wall_clock()
    if profile.traps.include_measurement_in_trap_time:
        trap_time += prep.measurement_duration
    trap_power = H2_QPE_TRAP_COUNT * profile.sources["trap"].power_at_source
    meas_power = prep.measurement_beam_count * prep.measurement_beam_power
    rows = [
        # label, power_mW, time_ms, energy_mJ expectations (None = input)
        ("optical traps", trap_power * 1e3, "490", trap_time * 1e3, "110.9",
         trap_power * trap_time * 1e3, "54.34"),
        ("measurement", meas_power * 1e3, "0.880", prep.measurement_duration * 1e3,
         None, meas_power * prep.measurement_duration * 1e3, "0.0792"),
        ("initialization", prep.pumping_power * 1e3, None,
         prep.pumping_duration * 1e3, None,
         prep.pumping_power * prep.pumping_duration * 1e3, "0.01"),
        ("cooling", prep.cooling_power * 1e3, None, prep.cooling_duration * 1e3,
         None, prep.cooling_power * prep.cooling_duration * 1e3, "0.1"),
    ]
    lines = [
        "baseline, preparation and measurement (per shot)",
        f"{'source':<16}{'power_mW':>10}{'time_ms':>10}{'energy_mJ':>12}",
    ]
    for label, power, power_exp, time_ms, time_exp, energy, energy_exp in rows:
        power_cell = (
            _check_cell(f"baseline.{label}.power_mW", power, power_exp, deviations)
            if power_exp
            else f"{power:.6g}"
        )
        time_cell = (
            _check_cell(f"baseline.{label}.time_ms", time_ms, time_exp, deviations)
            if time_exp
            else f"{time_ms:.6g}"
        )
        energy_cell = _check_cell(
            f"baseline.{label}.energy_mJ", energy, energy_exp, deviations
        )
        lines.append(f"{label:<16}{power_cell:>10}{time_cell:>10}{energy_cell:>12}")
    return lines


def cmd_reproduce(args) -> int:
    profile = _load_active_profile(args)
    deviations: list[str] = []
    sections: list[str] = []
    if args.table in ("computation", "all"):
        sections.extend(_reproduce_computation(profile, deviations))
        sections.append("")
    if args.table in ("baseline", "all"):
        sections.extend(_reproduce_baseline(profile, deviations))
        sections.append("")
    if args.table == "all":
        ledger, report = reproduce_qpe_experiment(H2_QPE_RUN, profile)
        cell = _check_cell("grand_total_J", report["grand_total_j"], "38.63", deviations)
        sections.append(
            f"grand total over {report['shots']} shots: {cell} J"
        )
        sections.append("")
    _emit(args, "\n".join(sections).rstrip("\n") + "\n")
    if deviations:
        sys.stderr.write("reference-table deviations:\n")
        for deviation in deviations:
            sys.stderr.write(f"  {deviation}\n")
        return EXIT_MISMATCH
    return EXIT_OK


def _scale_counts(args) -> list[int]:
    if args.n_min < 1 or args.n_max < args.n_min:
        raise ValueError("need 1 <= n-min <= n-max")
    if args.log:
        return logspace_counts(args.n_min, args.n_max, args.points)
    return list(range(args.n_min, args.n_max + 1, args.step))


def cmd_scale(args) -> int:
    profile = _load_active_profile(args)
    counts = _scale_counts(args)
    if not counts:
        raise ValueError("empty qubit-count range")
    curve = build_curve(counts, profile, mode=args.mode, shots=args.shots)
    fits = None
    if args.fit:
        ns = curve.column("n")
        fits = {
            "E_gates_J": fit_exponent(ns, curve.column("e_gates")),
            "E_transport_J": fit_exponent(ns, curve.column("e_transport")),
            "E_traps_J": fit_exponent(ns, curve.column("e_traps")),
            "E_total_J": fit_exponent(ns, curve.column("e_total")),
        }
    if args.format == "json":
        payload = json.loads(curve.to_json())
        payload["rotation_term_report"] = closed_form_report(
            counts[-1], profile, args.mode
        )
        if fits is not None:
            payload["fitted_exponents"] = fits
        _emit(args, json.dumps(payload, indent=2) + "\n")
    elif args.format == "csv":
        _emit(args, curve.to_csv())
        if fits is not None:
            for column, slope in fits.items():
                sys.stderr.write(f"fit {column}: {slope:.4f}\n")
    else:
        lines = [f"{'n':>8}{'E_gates_J':>14}{'E_transport_J':>15}{'E_traps_J':>14}{'E_total_J':>14}"]
        for row in curve.rows:
            lines.append(
                f"{row.n:>8}{row.e_gates:>14.6g}{row.e_transport:>15.6g}"
                f"{row.e_traps:>14.6g}{row.e_total:>14.6g}"
            )
        if fits is not None:
            lines.append("fitted exponents: " + ", ".join(
                f"{column}={slope:.3f}" for column, slope in fits.items()
            ))
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_compare(args) -> int:
    profile = _load_active_profile(args)
    catalog = load_catalog(args.catalog) if args.catalog else dict(BUILTIN_CATALOG)
    if args.machine not in catalog:
        raise ValueError(
            f"unknown machine {args.machine!r}; catalog has: "
            + ", ".join(sorted(catalog))
        )
    machine = catalog[args.machine]
    rows = []
    crossover = None
    for n in range(args.n_min, args.n_max + 1):
        quantum = total_quantum_energy(n, profile, args.mode).e_total
        classical = fft_energy(machine, n)
        rows.append((n, quantum, classical, quantum / classical))
        if crossover is None and quantum < classical:
            crossover = n
    crossover_text = str(crossover) if crossover is not None else "none"
    if args.format == "json":
        _emit(
            args,
            json.dumps(
                {
                    "machine": machine.name,
                    "joules_per_bitop": machine.joules_per_bitop,
                    "crossover_n": crossover,
                    "rows": [
                        {
                            "n": n,
                            "E_quantum_J": quantum,
                            "E_classical_J": classical,
                            "ratio": ratio,
                        }
                        for n, quantum, classical, ratio in rows
                    ],
                },
                indent=2,
            )
            + "\n",
        )
    elif args.format == "csv":
        lines = ["n,E_quantum_J,E_classical_J,ratio"]
        for n, quantum, classical, ratio in rows:
            lines.append(f"{n},{quantum!r},{classical!r},{ratio!r}")
        _emit(args, "\n".join(lines) + "\n")
        target = sys.stdout if args.output else sys.stderr
        target.write(f"crossover_n={crossover_text}\n")
    else:
        lines = [f"{'n':>6}{'E_quantum_J':>16}{'E_classical_J':>16}{'ratio':>12}"]
        for n, quantum, classical, ratio in rows:
            lines.append(f"{n:>6}{quantum:>16.6g}{classical:>16.6g}{ratio:>12.4g}")
        lines.append(f"crossover at n = {crossover_text} (machine {machine.name})")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_transport_sim(args) -> int:
    policy = TransportPolicy(mode=args.policy, blockade_radius=args.blockade_radius)
    result = simulate_transports(args.n, args.gates, policy, args.seed)
    profile = _load_active_profile(args)
    summary = result.summary()
    summary["analytic_slope_setting"] = profile.transport.transports_per_gate_slope
    if args.format == "csv":
        _emit(args, transport_sim_csv(result))
    elif args.format == "table":
        lines = ["transport simulation"]
        for key, value in summary.items():
            lines.append(f"  {key:<24}{value}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def cmd_qft_build(args) -> int:
    circuit = build_qft(
        args.n,
        include_final_swaps=args.swaps,
        exact_phase_correction=args.phase_correction,
    )
    _emit(args, circuit_to_text(circuit))
    return EXIT_OK


def _add_shared(parser: argparse.ArgumentParser, default_format: str):
    parser.add_argument("--profile", help=f"profile file (default: ${PROFILE_ENV_VAR} or builtin)")
    parser.add_argument("--output", help="write to this file instead of stdout")
    parser.add_argument(
        "--format",
        choices=("table", "json", "csv"),
        default=default_format,
        help=f"output format (default: {default_format})",
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="RNG seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydenergy",
        description="Energy estimation for tweezer-array quantum computation.",
    )
    parser.add_argument("--version", action="version", version=f"rydenergy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="energy ledger for a circuit or measured run")
    _add_shared(p, "table")
    p.add_argument("circuit", help="circuit file, qft:N, qpe:N, or qpe:h2")
    p.add_argument("--shots", type=int, help="repetitions (default 1; qpe:h2 uses 700)")
    p.add_argument("--mode", choices=MODES, default=AUTO)
    p.add_argument("--measured", action="store_true", help="bill measured on-times (qpe:h2)")
    p.add_argument("--n-traps", type=int, help="override the trap-array size")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("compile", help="pulse schedule summary for a circuit")
    _add_shared(p, "table")
    p.add_argument("circuit", help="circuit file, qft:N or qpe:N")
    p.add_argument("--mode", choices=MODES, default=AUTO)
    p.set_defaults(handler=cmd_compile)

    p = sub.add_parser("reproduce", help="check the pinned reference energy tables")
    _add_shared(p, "table")
    p.add_argument("--table", choices=("computation", "baseline", "all"), default="all")
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser("scale", help="QFT energy scaling curve over qubit counts")
    _add_shared(p, "csv")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--step", type=int, default=1, help="linear stride (default 1)")
    p.add_argument("--log", action="store_true", help="geometric spacing via --points")
    p.add_argument("--points", type=int, default=20, help="points when --log is set")
    p.add_argument("--fit", action="store_true", help="report per-component exponents")
    p.add_argument("--shots", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default=CALIBRATED)
    p.set_defaults(handler=cmd_scale)

    p = sub.add_parser("compare", help="quantum vs classical FFT energy")
    _add_shared(p, "csv")
    p.add_argument("--machine", required=True, help="catalog machine name")
    p.add_argument("--catalog", help="extra machine catalog (JSON list)")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=MODES, default=CALIBRATED)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("transport-sim", help="Monte-Carlo transport counting")
    _add_shared(p, "json")
    p.add_argument("--n", type=int, required=True, help="number of atoms (>= 2)")
    p.add_argument("--gates", type=int, required=True, help="random 2-qubit gates")
    p.add_argument(
        "--policy",
        choices=("move_adjacent_and_return", "move_adjacent_stay"),
        default="move_adjacent_and_return",
    )
    p.add_argument("--blockade-radius", type=int, default=1)
    p.set_defaults(handler=cmd_transport_sim)

    p = sub.add_parser("qft-build", help="emit a QFT circuit in text form")
    _add_shared(p, "table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--swaps", action="store_true", help="append the final swap layer")
    p.add_argument(
        "--phase-correction",
        action="store_true",
        help="add control-side Rz gates for the textbook unitary",
    )
    p.set_defaults(handler=cmd_qft_build)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ProfileError as exc:
        sys.stderr.write(f"profile error: {exc}\n")
        return EXIT_PROFILE
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
