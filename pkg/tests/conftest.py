"""
    Shared fixtures for rydberg_expansion.

    Read more about conftest.py under:
    - https://docs.pytest.org/en/stable/fixture.html
"""
import pytest

from rydberg_expansion.interactions import InteractionKernel
from rydberg_expansion.presets import RB70S_C6_AU
from rydberg_expansion.pulse import PulseShape, PulseSpec


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Keeps artifacts out of the source tree and ignores local settings."""
    monkeypatch.setenv("RYDBERG_OUTPUT_DIR", str(tmp_path / "artifacts"))
    for name in ("RYDBERG_WORKERS", "RYDBERG_MAX_ATOMS", "RYDBERG_ORACLE_MAX_N"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def square():
    return PulseSpec(PulseShape.SQUARE, T=1e-8)


@pytest.fixture
def gaussian():
    return PulseSpec(PulseShape.GAUSSIAN, T=1e-8)


@pytest.fixture
def attractive_c6():
    return InteractionKernel(6, -RB70S_C6_AU)


@pytest.fixture
def repulsive_c6():
    return InteractionKernel(6, RB70S_C6_AU)
