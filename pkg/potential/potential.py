import logging
from typing import Annotated, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import expit

from potential.constants import PhysicalConstants
from utils.errors import OutOfDomainError

logger = logging.getLogger(__name__)

# Marks impenetrable samples; the eigensolver turns them into Dirichlet rows
HARD_WALL = float("inf")


########## Potential variants ##########
class WoodSaxonParams(BaseModel):
    """Soft absorber ceiling: v0 / (1 + exp(-(z - z_wall) / diffuseness))."""

    model_config = ConfigDict(frozen=True)

    v0: float = Field(gt=0, description="Barrier height (J)")
    z_wall: float = Field(gt=0, description="Wall midpoint (m)")
    diffuseness: float = Field(gt=0, description="Edge softness (m)")


class InfiniteBox(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["box"] = "box"
    width: float = Field(gt=0, description="Box width a (m)")


class GravityFloor(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["gravity"] = "gravity"


class GravityWithAbsorber(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["gravity_absorber"] = "gravity_absorber"
    slit: float = Field(gt=0, description="Mirror to absorber distance (m)")
    absorber: WoodSaxonParams


class Tabulated(BaseModel):
    """Potential sampled at strictly increasing heights, linearly interpolated."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["tabulated"] = "tabulated"
    z: Tuple[float, ...]
    v: Tuple[float, ...]

    @model_validator(mode="after")
    def check_samples(self):
        if len(self.z) != len(self.v):
            raise ValueError(f"z has {len(self.z)} samples but v has {len(self.v)}")
        if len(self.z) < 2:
            raise ValueError("at least two samples are required")
        if np.any(np.diff(self.z) <= 0):
            raise ValueError("z samples must be strictly increasing")
        if not np.all(np.isfinite(self.z)):
            raise ValueError("z samples must be finite")
        return self


PotentialSpec = Annotated[
    Union[InfiniteBox, GravityFloor, GravityWithAbsorber, Tabulated],
    Field(discriminator="kind"),
]


def is_unbounded(spec) -> bool:
    """True for potentials that keep rising with z, so the grid edge truncates them."""
    return isinstance(spec, (GravityFloor, GravityWithAbsorber))


########## Grid ##########
class Grid(BaseModel):
    model_config = ConfigDict(frozen=True)

    z_min: float
    z_max: float
    n_points: int = Field(ge=16)

    @model_validator(mode="after")
    def check_range(self):
        if not self.z_max > self.z_min:
            raise ValueError(f"z_max ({self.z_max}) must exceed z_min ({self.z_min})")
        return self

    @property
    def spacing(self) -> float:
        return (self.z_max - self.z_min) / (self.n_points - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.z_min, self.z_max, self.n_points)


########## Evaluation ##########
def eval_potential(spec, consts: PhysicalConstants, z):
    """
    Potential energy in joules at height z (metres), scalar or array.

    Impenetrable regions evaluate to HARD_WALL. Tabulated potentials raise
    OutOfDomainError outside their sample range.
    """
    z_arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z_arr)):
        raise OutOfDomainError("potential evaluated at a non-finite height")

    if isinstance(spec, InfiniteBox):
        v = np.where((z_arr > 0) & (z_arr < spec.width), 0.0, HARD_WALL)
    elif isinstance(spec, GravityFloor):
        v = np.where(z_arr < 0, HARD_WALL, consts.weight * z_arr)
    elif isinstance(spec, GravityWithAbsorber):
        ws = spec.absorber
        ceiling = ws.v0 * expit((z_arr - ws.z_wall) / ws.diffuseness)
        v = np.where(z_arr < 0, HARD_WALL, consts.weight * z_arr + ceiling)
    elif isinstance(spec, Tabulated):
        lo, hi = spec.z[0], spec.z[-1]
        if np.any(z_arr < lo) or np.any(z_arr > hi):
            raise OutOfDomainError(
                f"height outside tabulated range [{lo:.6g}, {hi:.6g}] m",
                z_min=lo,
                z_max=hi,
            )
        v = np.interp(z_arr, spec.z, spec.v)
    else:
        raise TypeError(f"unknown potential variant: {type(spec).__name__}")

    return float(v) if v.ndim == 0 else v


def turning_point(spec, consts: PhysicalConstants, energy: float, grid: Grid) -> float:
    """Largest grid height where the potential does not exceed energy."""
    z = grid.points()
    v = eval_potential(spec, consts, z)
    allowed = np.flatnonzero(np.isfinite(v) & (v <= energy))
    if allowed.size == 0:
        return grid.z_min
    return float(z[allowed[-1]])
