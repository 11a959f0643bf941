import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal

from eigensolver.analytic import airy_zero_estimate
from potential.constants import PhysicalConstants
from potential.potential import (
    GravityWithAbsorber,
    Grid,
    InfiniteBox,
    Tabulated,
    eval_potential,
    is_unbounded,
    turning_point,
)
from utils.errors import DomainTruncationError, SolverConsistencyError

logger = logging.getLogger(__name__)

# Highest requested turning point must stay below this fraction of the grid
TRUNCATION_FRACTION = 0.8
NODE_THRESHOLD = 1e-12


########## Results ##########
@dataclass(frozen=True)
class EigenState:
    index: int
    energy: float
    psi: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return self.psi**2


@dataclass(frozen=True)
class Spectrum:
    states: Tuple[EigenState, ...]
    grid: Grid
    spec: object

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, i: int) -> EigenState:
        return self.states[i]

    @property
    def energies(self) -> np.ndarray:
        return np.array([s.energy for s in self.states])


########## Grid policy ##########
class GridPolicy(BaseModel):
    """How to size the grid when the caller does not supply one."""

    model_config = ConfigDict(frozen=True)

    n_points: int = Field(4000, ge=16)
    margin: float = Field(4.0, gt=1.0 / TRUNCATION_FRACTION)
    z_max: Optional[float] = Field(None, gt=0, description="Explicit upper edge (m)")

    def grid_for(self, spec, consts: PhysicalConstants, n_states: int) -> Grid:
        if isinstance(spec, InfiniteBox):
            return Grid(z_min=0.0, z_max=spec.width, n_points=self.n_points)
        if isinstance(spec, Tabulated):
            z_max = spec.z[-1] if self.z_max is None else min(self.z_max, spec.z[-1])
            return Grid(z_min=spec.z[0], z_max=z_max, n_points=self.n_points)
        if self.z_max is not None:
            return Grid(z_min=0.0, z_max=self.z_max, n_points=self.n_points)

        energy = consts.eps0 * airy_zero_estimate(n_states)
        height = energy / consts.weight
        z_max = self.margin * height
        if isinstance(spec, GravityWithAbsorber):
            # Adding the ceiling raises levels by at most v0, and never above
            # the point where the wall has fully risen
            ws = spec.absorber
            above_wall = (energy + ws.v0) / consts.weight
            height = max(height, min(above_wall, ws.z_wall + 10.0 * ws.diffuseness))
            edge = max(spec.slit, ws.z_wall) + 10.0 * ws.diffuseness
            z_max = max(self.margin * height, edge)
        return Grid(z_min=0.0, z_max=z_max, n_points=self.n_points)


########## Helpers ##########
def count_nodes(psi) -> int:
    """Sign changes between consecutive samples, skipping numerically-zero ones."""
    psi = np.asarray(psi, dtype=float)
    peak = np.max(np.abs(psi)) if psi.size else 0.0
    if peak == 0.0:
        return 0
    significant = psi[np.abs(psi) >= NODE_THRESHOLD * peak]
    signs = np.sign(significant)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def _fix_sign(psi: np.ndarray) -> np.ndarray:
    # First visible lobe is positive, so repeated solves give identical output
    peak = np.max(np.abs(psi))
    first = np.flatnonzero(np.abs(psi) > 1e-3 * peak)[0]
    return psi if psi[first] > 0 else -psi


########## Solver ##########
def solve_spectrum(spec, consts: PhysicalConstants, grid: Grid, n_states: int) -> Spectrum:
    """
    Lowest n_states eigenpairs of H = -(hbar^2/2m) d^2/dz^2 + V(z).

    The Hamiltonian is the 3-point finite-difference operator on the grid
    interior. Grid ends and HARD_WALL samples are Dirichlet points (psi = 0).
    Eigenvalues come from bisection on Sturm sequences and vectors from
    inverse iteration (LAPACK stebz/stein).
    """
    if n_states < 1:
        raise ValueError(f"n_states must be >= 1, got {n_states}")

    z = grid.points()
    v = eval_potential(spec, consts, z)
    interior = np.isfinite(v)
    interior[0] = interior[-1] = False
    idx = np.flatnonzero(interior)
    if idx.size < n_states:
        raise DomainTruncationError(
            f"only {idx.size} interior grid points for {n_states} states",
            n_points=grid.n_points,
        )

    # Work in units of eps0 so the matrix entries are O(1) to O(1e5)
    e_unit = consts.eps0
    hop = consts.hbar**2 / (2.0 * consts.m_n * grid.spacing**2) / e_unit
    diag = 2.0 * hop + v[idx] / e_unit
    adjacent = np.diff(idx) == 1
    off = np.where(adjacent, -hop, 0.0)

    logger.debug("solving %d states on %d interior points (spacing %.3g m)", n_states, idx.size, grid.spacing)
    w, vecs = eigh_tridiagonal(
        diag,
        off,
        select="i",
        select_range=(0, n_states - 1),
        lapack_driver="stebz",
    )
    energies = w * e_unit

    if is_unbounded(spec):
        z_turn = turning_point(spec, consts, energies[-1], grid)
        limit = grid.z_min + TRUNCATION_FRACTION * (grid.z_max - grid.z_min)
        if z_turn >= limit:
            raise DomainTruncationError(
                f"turning point of state {n_states} ({z_turn:.4g} m) is within "
                f"{1 - TRUNCATION_FRACTION:.0%} of the grid edge {grid.z_max:.4g} m",
                turning_point_m=z_turn,
                z_max_m=grid.z_max,
            )

    if np.any(np.diff(energies) <= 0):
        raise SolverConsistencyError("eigenvalues are not strictly increasing", energies_J=energies.tolist())

    states: List[EigenState] = []
    for i in range(n_states):
        psi = np.zeros_like(z)
        psi[idx] = vecs[:, i]
        psi /= np.sqrt(trapezoid(psi**2, z))
        psi = _fix_sign(psi)

        nodes = count_nodes(psi)
        if nodes != i:
            raise SolverConsistencyError(
                f"state {i + 1} has {nodes} nodes, expected {i}",
                state=i + 1,
                nodes=nodes,
            )
        states.append(EigenState(index=i + 1, energy=float(energies[i]), psi=psi))

    return Spectrum(states=tuple(states), grid=grid, spec=spec)
