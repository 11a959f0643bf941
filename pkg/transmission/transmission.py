import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from eigensolver.eigensolver import EigenState
from potential.potential import Grid
from utils.errors import (
    InconsistentDataError,
    InfiniteAttenuationError,
    OutOfDomainError,
    TotalAbsorptionError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OverlapResult:
    slit: float
    areas: Tuple[float, ...]
    combined: Optional[float] = None


def absorber_overlap(state: EigenState, grid: Grid, z_boundary: float) -> float:
    """Probability weight of a normalised state at heights >= z_boundary."""
    if not grid.z_min <= z_boundary <= grid.z_max:
        raise OutOfDomainError(
            f"absorber boundary {z_boundary:.6g} m outside grid [{grid.z_min:.6g}, {grid.z_max:.6g}] m",
            z_boundary_m=z_boundary,
        )
    z = grid.points()
    density = state.psi**2
    start = int(np.searchsorted(z, z_boundary, side="right"))
    edge = np.interp(z_boundary, z, density)
    area = trapezoid(np.concatenate(([edge], density[start:])), np.concatenate(([z_boundary], z[start:])))
    return float(min(max(area, 0.0), 1.0))


def overlaps(states: Sequence[EigenState], grid: Grid, z_boundary: float, weights: Optional[Sequence[float]] = None) -> OverlapResult:
    areas = tuple(absorber_overlap(s, grid, z_boundary) for s in states)
    combined = None
    if weights is not None:
        combined = float(np.dot(weights, areas[: len(weights)]))
    return OverlapResult(slit=z_boundary, areas=areas, combined=combined)


def absorption_fraction(k: float, delta_x: float) -> float:
    """A = 1 - exp(-k dx): share of the state absorbed over one step."""
    return -math.expm1(-k * delta_x)


def transmitted_count(n_max: float, k: float, x: float) -> float:
    """N(x) = N_max exp(-k x)."""
    return n_max * math.exp(-k * x)


def infer_k(n_out: float, n_max: float, length: float) -> float:
    """Attenuation coefficient from the counts at both ends of a cavity of given length."""
    if n_out <= 0:
        raise InfiniteAttenuationError("zero output count implies infinite attenuation", n_out=n_out)
    if n_out > n_max:
        raise InconsistentDataError(
            f"output count {n_out:.6g} exceeds entrance density {n_max:.6g}", n_out=n_out, n_max=n_max
        )
    return -math.log(n_out / n_max) / length


def k_from_overlap(area: float, delta_x: float) -> float:
    """Inverse of absorption_fraction: k = -ln(1 - A) / dx."""
    if area >= 1.0:
        raise TotalAbsorptionError(f"overlap area {area:.6g} leaves nothing to transmit", area=area)
    if area < 0.0:
        raise ValueError(f"overlap area must be non-negative, got {area}")
    return -math.log1p(-area) / delta_x


def theoretical_area(n_out: float, n_max: float, length: float, delta_x: float) -> float:
    """Overlap area the measured count implies, given the absorption step."""
    return absorption_fraction(infer_k(n_out, n_max, length), delta_x)


def step_from_overlap(area: float, k: float) -> float:
    """Absorption step dx that makes absorption_fraction(k, dx) equal area."""
    if k <= 0:
        raise ValueError(f"attenuation coefficient must be positive, got {k}")
    return k_from_overlap(area, 1.0) / k
