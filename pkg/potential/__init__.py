from .constants import DEFAULT_CONSTANTS, PhysicalConstants, constants_from_env
from .potential import (
    HARD_WALL,
    GravityFloor,
    GravityWithAbsorber,
    Grid,
    InfiniteBox,
    PotentialSpec,
    Tabulated,
    WoodSaxonParams,
    eval_potential,
    is_unbounded,
    turning_point,
)
from .units import cm, from_peV, to_cm, to_peV, to_um, um
