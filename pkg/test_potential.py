import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from potential.constants import PhysicalConstants, constants_from_env
from potential.potential import (
    HARD_WALL,
    GravityFloor,
    GravityWithAbsorber,
    Grid,
    InfiniteBox,
    Tabulated,
    WoodSaxonParams,
    eval_potential,
    turning_point,
)
from potential.units import from_peV, to_peV, um
from utils.errors import OutOfDomainError


def test_box_interior_is_zero(consts):
    assert eval_potential(InfiniteBox(width=um(15)), consts, um(7)) == 0.0


def test_box_walls_are_hard(consts):
    box = InfiniteBox(width=um(15))
    assert eval_potential(box, consts, 0.0) == HARD_WALL
    assert eval_potential(box, consts, um(15)) == HARD_WALL
    assert eval_potential(box, consts, um(-1)) == HARD_WALL


def test_gravity_floor_at_ten_microns(consts):
    v = eval_potential(GravityFloor(), consts, um(10))
    assert v == pytest.approx(1.6425e-31, rel=1e-4)
    assert to_peV(v) == pytest.approx(1.025, rel=1e-3)


def test_gravity_floor_below_mirror(consts):
    assert eval_potential(GravityFloor(), consts, -1e-9) == HARD_WALL


def test_gravity_floor_monotone(consts):
    z = np.linspace(0.0, um(200), 1001)
    assert np.all(np.diff(eval_potential(GravityFloor(), consts, z)) >= 0)


def test_wood_saxon_midpoint(consts):
    v0 = from_peV(2.0)
    spec = GravityWithAbsorber(slit=um(15), absorber=WoodSaxonParams(v0=v0, z_wall=um(15), diffuseness=um(0.5)))
    expected = consts.weight * um(15) + v0 / 2
    assert eval_potential(spec, consts, um(15)) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("z_um", [5.0, 14.0, 14.9, 15.1, 16.0, 40.0])
def test_wood_saxon_sharpens_into_step(consts, z_um):
    v0 = from_peV(2.0)
    z_wall = um(15)
    spec = GravityWithAbsorber(slit=z_wall, absorber=WoodSaxonParams(v0=v0, z_wall=z_wall, diffuseness=z_wall / 1e4))
    z = um(z_um)
    step = consts.weight * z + (v0 if z > z_wall else 0.0)
    assert abs(eval_potential(spec, consts, z) - step) <= 1e-6 * v0


def test_wood_saxon_no_overflow_far_from_wall(consts):
    spec = GravityWithAbsorber(slit=um(15), absorber=WoodSaxonParams(v0=1e-31, z_wall=um(15), diffuseness=1e-12))
    v = eval_potential(spec, consts, np.array([0.0, um(1), um(100)]))
    assert np.all(np.isfinite(v))


def test_tabulated_interpolates(consts):
    spec = Tabulated(z=(0.0, um(10), um(20)), v=(0.0, 1e-31, 4e-31))
    assert eval_potential(spec, consts, um(5)) == pytest.approx(0.5e-31)
    assert eval_potential(spec, consts, um(15)) == pytest.approx(2.5e-31)


def test_tabulated_outside_range(consts):
    spec = Tabulated(z=(0.0, um(10)), v=(0.0, 1e-31))
    with pytest.raises(OutOfDomainError):
        eval_potential(spec, consts, um(11))


def test_tabulated_requires_increasing_heights():
    with pytest.raises(ValidationError):
        Tabulated(z=(0.0, um(10), um(10)), v=(0.0, 1.0, 2.0))


@pytest.mark.parametrize(
    "build",
    [
        lambda: InfiniteBox(width=0.0),
        lambda: WoodSaxonParams(v0=0.0, z_wall=1e-5, diffuseness=1e-7),
        lambda: WoodSaxonParams(v0=1e-31, z_wall=1e-5, diffuseness=0.0),
        lambda: GravityWithAbsorber(slit=-1e-6, absorber=WoodSaxonParams(v0=1e-31, z_wall=1e-5, diffuseness=1e-7)),
        lambda: Grid(z_min=0.0, z_max=1e-5, n_points=15),
        lambda: Grid(z_min=1e-5, z_max=1e-5, n_points=100),
        lambda: PhysicalConstants(g=0.0),
    ],
)
def test_invalid_values_rejected(build):
    with pytest.raises(ValidationError):
        build()


def test_grid_spacing():
    grid = Grid(z_min=0.0, z_max=um(100), n_points=4001)
    assert grid.spacing == pytest.approx(um(100) / 4000)
    assert grid.points()[-1] == pytest.approx(um(100))


def test_eps0_default(consts):
    assert consts.eps0 == pytest.approx(9.64e-32, rel=5e-3)
    assert to_peV(consts.eps0) == pytest.approx(0.602, rel=5e-3)


def test_eps0_follows_constants():
    heavy = PhysicalConstants(g=2 * 9.80665)
    assert heavy.eps0 == pytest.approx(PhysicalConstants().eps0 * 2 ** (2 / 3))
    assert heavy.eps0 == pytest.approx(heavy.weight * heavy.length_scale)


def test_constants_from_env(monkeypatch):
    monkeypatch.setenv("BOUNCER_G", "9.81")
    assert constants_from_env().g == 9.81


def test_peV_conversions():
    assert to_peV(0.0) == 0.0
    assert to_peV(1.602176634e-31) == pytest.approx(1.0, rel=1e-15)


# Joule values must stay normal floats, so tiny energies are excluded
@given(st.one_of(st.just(0.0), st.floats(min_value=1e-250, max_value=1e6), st.floats(min_value=-1e6, max_value=-1e-250)))
def test_peV_round_trip(e_peV):
    assert to_peV(from_peV(e_peV)) == pytest.approx(e_peV, rel=1e-14, abs=1e-300)


def test_turning_point_gravity(consts):
    grid = Grid(z_min=0.0, z_max=um(100), n_points=10001)
    energy = consts.weight * um(13.7)
    assert turning_point(GravityFloor(), consts, energy, grid) == pytest.approx(um(13.7), abs=grid.spacing)
