"""Pytest fixtures for nh_eur tests."""

import math

import pytest

from nh_eur.models import AntiPTParams, GeneralNHParams, InitialStateSpec

HALF_PI = math.pi / 2


@pytest.fixture
def unbroken() -> GeneralNHParams:
    """PT instance with real spectrum (s = sigma = 2, r = 1)."""
    return GeneralNHParams.pt(r=1.0, s=2.0, phi=HALF_PI)


@pytest.fixture
def broken() -> GeneralNHParams:
    """PT instance with a complex-conjugate spectrum (s = sigma = 1, r = 2)."""
    return GeneralNHParams.pt(r=2.0, s=1.0, phi=HALF_PI)


@pytest.fixture
def exceptional() -> GeneralNHParams:
    """PT exceptional point s = sigma = r = 1."""
    return GeneralNHParams.pt(r=1.0, s=1.0, phi=HALF_PI)


@pytest.fixture
def general() -> GeneralNHParams:
    """Non-PT instance (sigma = sqrt 2, s = sqrt 2 / 2) below its exceptional point."""
    return GeneralNHParams(r=0.5, s=math.sqrt(2) / 2, sigma=math.sqrt(2), phi=HALF_PI)


@pytest.fixture
def hermitian() -> GeneralNHParams:
    """Hermitian member of the family (phi = 0)."""
    return GeneralNHParams.pt(r=1.0, s=2.0, phi=0.0)


@pytest.fixture
def anti_pt() -> AntiPTParams:
    """Anti-PT instance with lambda = 1, phi = 0 and s = 0.5."""
    return AntiPTParams(lam=1.0, s=0.5, phi=0.0)


@pytest.fixture
def plus_state() -> InitialStateSpec:
    return InitialStateSpec.plus()


@pytest.fixture
def zero_state() -> InitialStateSpec:
    return InitialStateSpec.zero()


@pytest.fixture
def write_config(tmp_path):
    """Write configuration text to a file and return its path."""

    def _write(text: str, name: str = "run.cfg"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write
