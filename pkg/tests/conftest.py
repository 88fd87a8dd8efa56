from pathlib import Path

import numpy as np
import pytest

from wavetails.models.config import GridConfig, SimulationConfig
from wavetails.models.dimension import DimensionIndex
from wavetails.models.nonlinearity import NonlinearityTerm
from wavetails.models.profiles import (
    BumpComponent,
    GeneratingFunction,
    get_default_profile,
)
from wavetails.operations.observers import ObserverSeries

CONFIGS_DIRECTORY = Path(__file__).resolve().parents[1] / "configs"


@pytest.fixture
def configs_directory():
    return CONFIGS_DIRECTORY


@pytest.fixture
def quartic_bump():
    """(1 - x^2)^2 on [-1, 1]; its integrals are known in closed form."""
    return GeneratingFunction((BumpComponent(1.0, 0.0, 1.0, 2),))


@pytest.fixture
def symmetric_bump():
    return GeneratingFunction((BumpComponent(1.0, 0.0, 1.0, 8),))


@pytest.fixture
def wide_bump():
    return GeneratingFunction((BumpComponent(1.0, 0.0, 2.0, 8),))


@pytest.fixture
def default_profile():
    return get_default_profile()


@pytest.fixture
def cubic_term():
    return NonlinearityTerm(c=1.0, p=3)


@pytest.fixture
def small_grid():
    return GridConfig(dr=0.05, r_out=10.0, t_max=6.0, cfl=0.25)


@pytest.fixture
def free_config(wide_bump, small_grid):
    return SimulationConfig(
        dimension=DimensionIndex(1),
        terms=(),
        generating=wide_bump,
        grid=small_grid,
        epsilons=(0.05,),
        observers=(1.0,),
    )


@pytest.fixture
def cubic_config(free_config, cubic_term):
    return free_config.with_terms((cubic_term,))


def make_power_law_series(
    gamma: float,
    amplitude: float,
    correction: float = 0.0,
    epsilon: float = 0.05,
    t_lo: float = 10.0,
    t_hi: float = 400.0,
    d_t: float = 0.25,
    r_obs: float = 2.0,
    config_hash: str = "synthetic",
) -> ObserverSeries:
    """A * t^-gamma * (1 + correction / t) with its exact derivative."""
    t = np.arange(t_lo, t_hi + 0.5 * d_t, d_t)
    phi = amplitude * t**-gamma * (1 + correction / t)
    phi_t = -amplitude * (
        gamma * t ** (-gamma - 1)
        + (gamma + 1) * correction * t ** (-gamma - 2)
    )
    return ObserverSeries(
        r_obs=r_obs,
        t=t,
        phi=phi,
        phi_t=phi_t,
        epsilon=epsilon,
        config_hash=config_hash,
    )


@pytest.fixture
def power_law_series():
    return make_power_law_series
