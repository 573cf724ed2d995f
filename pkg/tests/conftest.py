import numpy as np
import pytest

from cropmeta.cropsim.types import ManagementPlan
from cropmeta.datagen.dataset import generate_dataset
from cropmeta.datagen.scenarios import build_factorial
from cropmeta.datagen.soils import soil_by_code, soil_library
from cropmeta.datagen.weather import SyntheticWeatherStore, generate_weather


@pytest.fixture(scope="session")
def peat_soil():
    return soil_by_code(201)


@pytest.fixture(scope="session")
def sand_soil():
    return soil_by_code(305)


@pytest.fixture(scope="session")
def weather_2001():
    return generate_weather(11, 0, 2001)


@pytest.fixture(scope="session")
def mgmt():
    return ManagementPlan(
        sowing_doy=110,
        n_events=((110, 120.0), (150, 60.0)),
        irrigation_events=((170, 20.0), (195, 20.0)),
        earliness=0.5,
        max_rooting_depth=50.0,
    )


@pytest.fixture(scope="session")
def tiny_data():
    """48 simulated samples: 2 locations x 3 years x 8 soils, one replicate."""
    soils = soil_library()[:8]
    scenarios = build_factorial(5, range(2), range(2000, 2003), soils, 1)
    return generate_dataset(scenarios, SyntheticWeatherStore(master_seed=5), soils)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
