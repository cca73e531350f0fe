"""Profile loading, validation, and the microwave power model."""

import json
import math

import pytest
from hypothesis import given, strategies as st

from rydenergy.hwmodel import (
    HardwareProfile,
    MicrowaveCavity,
    ProfileError,
    RadiationSource,
    default_profile,
    load_profile,
    microwave_power_from_rabi,
    profile_from_dict,
    profile_to_dict,
    save_profile,
)


class TestRadiationSource:
    def test_power_at_target_reference_laser(self):
        src = RadiationSource("laser459", 100e-3, 0.5)
        assert src.power_at_target == pytest.approx(50e-3)

    def test_lossless_source_passes_power_through(self):
        src = RadiationSource("x", 0.123, 0.0)
        assert src.power_at_target == 0.123

    def test_trap_loss(self):
        src = RadiationSource("trap", 10e-3, 0.7)
        assert src.power_at_target == pytest.approx(3e-3)

    @pytest.mark.parametrize("loss", [1.0, 1.5, -0.1])
    def test_invalid_loss_fraction_rejected(self, loss):
        with pytest.raises(ProfileError):
            RadiationSource("x", 1.0, loss)

    def test_nonpositive_power_rejected(self):
        with pytest.raises(ProfileError):
            RadiationSource("x", 0.0, 0.1)

    @given(
        power=st.floats(1e-6, 1e3),
        loss_a=st.floats(0.0, 0.99),
        loss_b=st.floats(0.0, 0.99),
    )
    def test_power_at_target_monotone_in_loss_and_linear_in_power(
        self, power, loss_a, loss_b
    ):
        low, high = sorted([loss_a, loss_b])
        assert (
            RadiationSource("x", power, high).power_at_target
            <= RadiationSource("x", power, low).power_at_target
        )
        doubled = RadiationSource("x", 2 * power, loss_a).power_at_target
        assert doubled == pytest.approx(
            2 * RadiationSource("x", power, loss_a).power_at_target
        )


class TestDefaults:
    def test_default_profile_reference_values(self, profile):
        assert profile.sources["laser459"].power_at_source == pytest.approx(100e-3)
        assert profile.sources["laser459"].loss_fraction == 0.5
        assert profile.sources["laser1040"].power_at_source == pytest.approx(11.0)
        assert profile.sources["microwave"].power_at_source == pytest.approx(57.4e-3)
        assert profile.gates.rabi_global == pytest.approx(76.5e3)
        assert profile.gates.rabi_rz == pytest.approx(600e3)
        assert profile.gates.rabi_cz == pytest.approx(1.7e6)
        assert profile.gates.cz_phase_phi01 == pytest.approx(1.254)
        assert profile.calibration.enabled
        assert profile.calibration.t_hadamard == pytest.approx(25.7693e-6)
        assert profile.calibration.e_hadamard == pytest.approx(4.98e-6)
        assert profile.calibration.t_cz == pytest.approx(12.2836e-6)
        assert profile.calibration.e_cz == pytest.approx(47.3e-6)
        assert profile.traps.power_per_trap_at_source == pytest.approx(10e-3)
        assert profile.transport.max_speed == pytest.approx(0.55)
        assert profile.prep.shots == 700
        assert profile.scaling_prep_time == pytest.approx(0.2)

    def test_cz_phi11_always_derived(self, profile):
        gates = profile.gates
        assert gates.cz_phase_phi11 == pytest.approx(2 * 1.254 - math.pi)

    def test_rabi_convention_linear_by_default(self, profile):
        assert profile.gates.omega_global == pytest.approx(2 * math.pi * 76.5e3)
        assert profile.gates.omega_rz == pytest.approx(2 * math.pi * 600e3)

    def test_angular_convention(self, angular_profile):
        assert angular_profile.gates.omega_global == pytest.approx(76.5e3)
        assert angular_profile.gates.omega_cz == pytest.approx(1.7e6)


class TestLoading:
    def test_load_default_file(self, tmp_path):
        path = tmp_path / "profile.json"
        save_profile(default_profile(), path)
        assert load_profile(path) == default_profile()

    def test_round_trip_is_identity(self, tmp_path, profile):
        # serialize -> parse must reproduce the profile exactly
        reloaded = profile_from_dict(profile_to_dict(profile))
        assert reloaded == profile
        path = tmp_path / "p.json"
        save_profile(reloaded, path)
        assert load_profile(path) == profile

    def test_round_trip_with_overrides(self, tmp_path):
        raw = {
            "sources": {"laser459": {"power_mw": 123.0, "loss_fraction": 0.25}},
            "gates": {"rabi_rz_khz": 700.0, "rabi_convention": "angular-frequency"},
            "traps": {"power_per_trap_mw": 7.5},
            "prep": {"shots": 3},
            "scaling_prep_time_ms": 150.0,
        }
        loaded = profile_from_dict(raw)
        assert loaded.sources["laser459"].power_at_source == pytest.approx(0.123)
        assert loaded.gates.omega_rz == pytest.approx(700e3)
        assert profile_from_dict(profile_to_dict(loaded)) == loaded

    def test_omitted_calibration_block_disables_it_with_defaults(self):
        loaded = profile_from_dict({})
        assert not loaded.calibration.enabled
        assert loaded.calibration.t_hadamard == pytest.approx(25.7693e-6)
        assert loaded.calibration.e_cz == pytest.approx(47.3e-6)

    def test_loss_fraction_of_one_rejected(self):
        with pytest.raises(ProfileError):
            profile_from_dict({"sources": {"laser459": {"power_mw": 1.0, "loss_fraction": 1.0}}})

    def test_negative_power_rejected(self):
        with pytest.raises(ProfileError):
            profile_from_dict({"sources": {"microwave": {"power_mw": -5.0}}})

    def test_negative_duration_rejected(self):
        with pytest.raises(ProfileError):
            profile_from_dict({"prep": {"cooling_duration_ms": -1.0}})

    def test_unknown_source_id_rejected(self):
        with pytest.raises(ProfileError, match="unknown source"):
            profile_from_dict({"sources": {"laser650": {"power_mw": 1.0}}})

    def test_block_owned_source_rejected_in_sources_map(self):
        with pytest.raises(ProfileError, match="trap"):
            profile_from_dict({"sources": {"trap": {"power_mw": 1.0}}})

    def test_missing_required_source_id_names_it(self, profile):
        sources = {k: v for k, v in profile.sources.items() if k != "laser1040"}
        with pytest.raises(ProfileError, match="laser1040"):
            HardwareProfile(
                sources=sources,
                gates=profile.gates,
                calibration=profile.calibration,
                traps=profile.traps,
                transport=profile.transport,
                prep=profile.prep,
                cavity=profile.cavity,
            )

    def test_unknown_keys_rejected(self):
        with pytest.raises(ProfileError, match="unknown keys"):
            profile_from_dict({"gates": {"rabi_global_mhz": 1.0}})

    def test_unreadable_file_is_profile_error(self, tmp_path):
        with pytest.raises(ProfileError):
            load_profile(tmp_path / "missing.json")

    def test_invalid_json_is_profile_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ProfileError):
            load_profile(path)


class TestMicrowavePower:
    def test_default_cavity_reproduces_billed_microwave_power(self, profile):
        power = microwave_power_from_rabi(profile.gates.omega_global, profile.cavity)
        # the default cavity block is pinned to the billed source power
        assert power == pytest.approx(57.4e-3, rel=1e-6)

    def test_quadratic_in_rabi_frequency(self, profile):
        base = microwave_power_from_rabi(1e5, profile.cavity)
        assert microwave_power_from_rabi(2e5, profile.cavity) == pytest.approx(4 * base)

    @given(scale=st.floats(0.01, 100.0))
    def test_scaling_property(self, scale):
        cavity = MicrowaveCavity()
        base = microwave_power_from_rabi(1e5, cavity)
        scaled = microwave_power_from_rabi(scale * 1e5, cavity)
        assert scaled == pytest.approx(scale**2 * base, rel=1e-9)

    def test_below_cutoff_is_domain_error(self):
        cavity = MicrowaveCavity()
        cutoff_radius = 299792458.0 * cavity.bessel_root / cavity.transition_angular_frequency
        with pytest.raises(ProfileError):
            MicrowaveCavity(cavity_radius=cutoff_radius * 0.5)
        with pytest.raises(ProfileError):
            MicrowaveCavity(cavity_radius=cutoff_radius * 0.999999)
        barely_above = MicrowaveCavity(cavity_radius=cutoff_radius * 1.0001)
        assert microwave_power_from_rabi(1e5, barely_above) > 0

    def test_diverges_monotonically_toward_cutoff(self):
        cavity = MicrowaveCavity()
        cutoff_radius = 299792458.0 * cavity.bessel_root / cavity.transition_angular_frequency
        powers = [
            microwave_power_from_rabi(1e5, MicrowaveCavity(cavity_radius=cutoff_radius * f))
            for f in (2.0, 1.5, 1.1, 1.01, 1.001)
        ]
        assert all(a < b for a, b in zip(powers, powers[1:]))
