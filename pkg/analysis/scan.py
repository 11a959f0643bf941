import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from analysis.density import PopulationWeights
from eigensolver.eigensolver import GridPolicy, solve_spectrum
from potential.constants import PhysicalConstants
from potential.potential import GravityWithAbsorber, WoodSaxonParams
from transmission.absorber import AbsorberModel
from transmission.transmission import k_from_overlap, overlaps
from utils.errors import BouncerError, ScanError

logger = logging.getLogger(__name__)


class AbsorberFamily(BaseModel):
    """Maps a slit width to mirror + gravity + Wood-Saxon ceiling whose wall tracks the slit."""

    model_config = ConfigDict(frozen=True)

    v0: float = Field(gt=0, description="Ceiling height (J)")
    diffuseness: float = Field(gt=0, description="Ceiling edge softness (m)")
    wall_offset: float = Field(0.0, description="Wall midpoint minus slit width (m)")

    def __call__(self, slit: float) -> GravityWithAbsorber:
        params = WoodSaxonParams(v0=self.v0, z_wall=slit + self.wall_offset, diffuseness=self.diffuseness)
        return GravityWithAbsorber(slit=slit, absorber=params)


@dataclass(frozen=True)
class ScanRow:
    slit: float
    energies: Tuple[float, ...]
    areas: Tuple[float, ...]
    ks: Tuple[float, ...]
    n_max: float
    n_out: float

    def transmissions(self, cavity_length: float) -> np.ndarray:
        return np.exp(-np.asarray(self.ks) * cavity_length)


@dataclass(frozen=True)
class ScanResult:
    rows: Tuple[ScanRow, ...]
    weights: PopulationWeights
    absorber: AbsorberModel
    non_monotone: Tuple[Tuple[float, float], ...] = field(default_factory=tuple)

    @property
    def slits(self) -> np.ndarray:
        return np.array([r.slit for r in self.rows])

    @property
    def n_out(self) -> np.ndarray:
        return np.array([r.n_out for r in self.rows])


def _scan_row(
    slit: float,
    family: Callable[[float], object],
    consts: PhysicalConstants,
    grid_policy: GridPolicy,
    absorber: AbsorberModel,
    weights: PopulationWeights,
) -> ScanRow:
    n_states = len(weights.c)
    try:
        spec = family(slit)
        grid = grid_policy.grid_for(spec, consts, n_states)
        spectrum = solve_spectrum(spec, consts, grid, n_states)
        overlap = overlaps(spectrum.states, grid, slit, weights=weights.c)
        areas = overlap.areas
        ks = tuple(k_from_overlap(a, absorber.delta_x) for a in areas)
    except BouncerError as e:
        raise ScanError(slit, e) from e

    n_max = absorber.n_max(slit)
    n_out = n_max * math.fsum(c * math.exp(-k * absorber.cavity_length) for c, k in zip(weights.c, ks))
    logger.debug("slit %.4g um: areas %s (weighted %.4g), N_out %.4g", slit * 1e6, areas, overlap.combined, n_out)
    return ScanRow(
        slit=slit,
        energies=tuple(float(e) for e in spectrum.energies),
        areas=areas,
        ks=ks,
        n_max=n_max,
        n_out=n_out,
    )


def predict_scan(
    family: Callable[[float], object],
    consts: PhysicalConstants,
    grid_policy: GridPolicy,
    absorber: AbsorberModel,
    weights: PopulationWeights,
    slits: Sequence[float],
    workers: int = 1,
) -> ScanResult:
    """
    Predicted output count for each slit width (metres).

    Every slit gets its own spectrum; state overlaps beyond the slit become
    attenuation coefficients, and N_out = N_max(z) sum_i C_i exp(-k_i L).
    Rows are independent and may be evaluated on a thread pool.
    """
    slits = [float(s) for s in slits]
    if not slits:
        raise ValueError("no slit widths to scan")
    if any(s <= 0 for s in slits) or any(b <= a for a, b in zip(slits, slits[1:])):
        raise ValueError("slit widths must be positive and strictly increasing")

    def row(slit: float) -> ScanRow:
        return _scan_row(slit, family, consts, grid_policy, absorber, weights)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows: List[ScanRow] = list(pool.map(row, slits))
    else:
        rows = [row(s) for s in slits]

    non_monotone = []
    for a, b in zip(rows, rows[1:]):
        if b.n_out < a.n_out * (1.0 - 1e-9):
            logger.warning(
                "N_out drops from %.6g at %.4g um to %.6g at %.4g um",
                a.n_out, a.slit * 1e6, b.n_out, b.slit * 1e6,
            )
            non_monotone.append((a.slit, b.slit))

    return ScanResult(rows=tuple(rows), weights=weights, absorber=absorber, non_monotone=tuple(non_monotone))


def cavity_length_sweep(row: ScanRow, weights: PopulationWeights, lengths: Sequence[float]) -> np.ndarray:
    """N_out of one scanned slit for other cavity lengths, reusing its attenuation coefficients."""
    c = weights.as_array()
    return np.array([row.n_max * float(c @ row.transmissions(length)) for length in lengths])


class PopulationModel:
    """
    N_out as a function of the level populations, for fixed slit widths.

    The count is linear in C, so one scan yields the design matrix
    M[j, i] = N_max(z_j) exp(-k_i(z_j) L) and the model is M @ C.
    """

    def __init__(self, slits: np.ndarray, design: np.ndarray):
        self.slits = np.asarray(slits, dtype=float)
        self.design = np.asarray(design, dtype=float)

    @classmethod
    def from_scan(cls, scan: ScanResult) -> "PopulationModel":
        length = scan.absorber.cavity_length
        design = np.array([r.n_max * r.transmissions(length) for r in scan.rows])
        return cls(scan.slits, design)

    def design_at(self, z: np.ndarray) -> np.ndarray:
        rows = []
        for zj in np.asarray(z, dtype=float):
            match = np.flatnonzero(np.isclose(self.slits, zj, rtol=1e-9, atol=0.0))
            if match.size == 0:
                raise ValueError(f"model has no prediction for slit {zj:.6g} m")
            rows.append(self.design[match[0]])
        return np.array(rows)

    def __call__(self, weights: PopulationWeights) -> np.ndarray:
        return self.design @ weights.as_array()
