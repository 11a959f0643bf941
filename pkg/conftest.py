import pytest

from analysis.scan import AbsorberFamily
from eigensolver.eigensolver import solve_spectrum
from potential.constants import PhysicalConstants
from potential.potential import GravityFloor, Grid
from potential.units import cm, from_peV, um
from transmission.absorber import AbsorberModel, ConstantDensity


@pytest.fixture(scope="session")
def consts():
    return PhysicalConstants()


@pytest.fixture(scope="session")
def gravity_grid():
    return Grid(z_min=0.0, z_max=um(100), n_points=4000)


@pytest.fixture(scope="session")
def gravity_spectrum(consts, gravity_grid):
    return solve_spectrum(GravityFloor(), consts, gravity_grid, 4)


@pytest.fixture(scope="session")
def family():
    return AbsorberFamily(v0=from_peV(0.5), diffuseness=um(0.5))


@pytest.fixture(scope="session")
def appendix_absorber():
    return AbsorberModel(delta_x=cm(0.0320259), cavity_length=cm(10), n_max_model=ConstantDensity(value=0.3))
