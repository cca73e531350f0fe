import pytest

from rydenergy.hwmodel import default_profile, profile_from_dict


@pytest.fixture(scope="session")
def profile():
    """Bundled default profile; immutable, safe to share across tests."""
    return default_profile()


@pytest.fixture(scope="session")
def angular_profile():
    """Same machine but with Rabi values read as angular frequencies."""
    return profile_from_dict(
        {
            "calibration": {"enabled": True},
            "gates": {"rabi_convention": "angular-frequency"},
        }
    )
