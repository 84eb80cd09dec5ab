import numpy as np
import pytest

from reason_sim.sim.runner import SimConfig, SimMode, run
from reason_sim.utils.logging import set_quiet
from reason_sim.world.scenario import default_scenario


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    set_quiet(True)
    yield
    set_quiet(False)


@pytest.fixture
def scenario():
    return default_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def baseline_log():
    return run(SimConfig(default_scenario(), SimMode.BASELINE))


@pytest.fixture(scope="session")
def replanner_log():
    return run(SimConfig(default_scenario(), SimMode.REPLANNER))
