import pytest

from fractw import IntegrateOptions, WaveConfig, integrate


@pytest.fixture(scope="session")
def cfg09():
    return WaveConfig.from_states(1.0, -0.6, 0.9)


@pytest.fixture(scope="session")
def cfg05():
    return WaveConfig.from_states(1.0, -0.6, 0.5)


@pytest.fixture(scope="session")
def classical_run(cfg09):
    """Moderate-resolution classical trajectory shared by several tests."""
    return integrate(cfg09, 0.5, IntegrateOptions(dx=0.02, length=200.0))


@pytest.fixture(scope="session")
def blowdown_run(cfg09):
    return integrate(cfg09, 50.0, IntegrateOptions(dx=0.01, length=500.0))
