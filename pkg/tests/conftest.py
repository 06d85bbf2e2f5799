import numpy as np
import pytest

from taillab.core.grids import uniform_grid
from taillab.potentials import Family, PotentialSpec, free_spec
from taillab.timedomain.initial_data import Bump, Gaussian


@pytest.fixture
def free_potential():
    return free_spec(3)


@pytest.fixture
def repulsive_m3():
    return PotentialSpec(family=Family.PURE, m=3, v_plus=1.0, v_minus=1.0, x_plus=2.0, x_minus=-2.0)


@pytest.fixture
def repulsive_m4():
    return PotentialSpec(family=Family.PURE, m=4, v_plus=1.0, v_minus=1.0, x_plus=2.0, x_minus=-2.0)


@pytest.fixture
def deep_well():
    return PotentialSpec(
        family=Family.PURE,
        m=3,
        v_plus=1.0,
        v_minus=1.0,
        x_plus=2.0,
        x_minus=-2.0,
        well_depth=-10.0,
        well_halfwidth=1.0,
    )


@pytest.fixture
def line_grid():
    return uniform_grid(-12.0, 12.0, 0.01)


@pytest.fixture
def gaussian_bump():
    return Gaussian(center=0.0, width=0.5, amplitude=1.0)


@pytest.fixture
def smooth_bump():
    return Bump(center=0.0, radius=1.5, amplitude=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
