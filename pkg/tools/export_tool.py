import logging
import math
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from analysis.curves import thresholded_curve
from analysis.dataset import ExperimentalDataset
from analysis.density import PopulationWeights, mixed_density
from analysis.fitting import PopulationFit, ThresholdFit
from analysis.scan import PopulationModel, ScanResult, cavity_length_sweep
from eigensolver.analytic import AIRY_ZEROS, box_eigenvalue_analytic, gravity_eigenvalue_analytic
from eigensolver.eigensolver import Spectrum
from potential.constants import PhysicalConstants
from potential.potential import GravityFloor, InfiniteBox, turning_point
from potential.units import to_cm, to_peV, to_um

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.9g"
SCAN_COLUMNS = (
    ["slit_um"]
    + [f"E{i}_peV" for i in range(1, 5)]
    + [f"A{i}" for i in range(1, 5)]
    + [f"k{i}_percm" for i in range(1, 5)]
    + ["N_out"]
)


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """Write a frame with a header row and 9 significant digits per value."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="nan")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


########## Frames ##########
def _analytic_energy(spec, consts: PhysicalConstants, n: int) -> float:
    if isinstance(spec, InfiniteBox):
        return box_eigenvalue_analytic(n, spec.width, consts)
    if isinstance(spec, GravityFloor) and n <= len(AIRY_ZEROS):
        return gravity_eigenvalue_analytic(n, consts)
    return math.nan


def spectrum_frame(spectrum: Spectrum, consts: PhysicalConstants) -> pd.DataFrame:
    records = []
    for state in spectrum.states:
        analytic = _analytic_energy(spectrum.spec, consts, state.index)
        records.append(
            {
                "E_peV": to_peV(state.energy),
                "n": state.index,
                "E_analytic_peV": to_peV(analytic),
                "relative_deviation": state.energy / analytic - 1.0 if math.isfinite(analytic) else math.nan,
                "turning_point_um": to_um(turning_point(spectrum.spec, consts, state.energy, spectrum.grid)),
            }
        )
    return pd.DataFrame.from_records(records)


def density_frame(spectrum: Spectrum, weights: Optional[PopulationWeights]) -> pd.DataFrame:
    columns = {"z_um": to_um(spectrum.grid.points())}
    for state in spectrum.states:
        columns[f"psi{state.index}_sq"] = state.density
    if weights is not None and len(spectrum) >= len(weights.c):
        columns["mixed"] = mixed_density(spectrum, weights)
    return pd.DataFrame(columns)


def scan_frame(scan: ScanResult) -> pd.DataFrame:
    records = []
    for row in scan.rows:
        values = [to_um(row.slit)]
        values += [to_peV(e) for e in row.energies[:4]]
        values += list(row.areas[:4])
        values += [k * 1e-2 for k in row.ks[:4]]
        values.append(row.n_out)
        records.append(values)
    return pd.DataFrame.from_records(records, columns=SCAN_COLUMNS)


def length_sweep_frame(scan: ScanResult, lengths: Sequence[float]) -> pd.DataFrame:
    records = []
    for row in scan.rows:
        for length, n_out in zip(lengths, cavity_length_sweep(row, scan.weights, lengths)):
            records.append({"slit_um": to_um(row.slit), "length_cm": to_cm(length), "N_out": n_out})
    return pd.DataFrame.from_records(records, columns=["slit_um", "length_cm", "N_out"])


def populations_frame(fit: PopulationFit) -> pd.DataFrame:
    record = {f"C{i}": c for i, c in enumerate(fit.weights.c, start=1)}
    record["residual"] = fit.residual
    return pd.DataFrame.from_records([record])


def threshold_frame(fit: ThresholdFit) -> pd.DataFrame:
    return pd.DataFrame.from_records(
        [{"scale": fit.params.scale, "z0_um": to_um(fit.params.z0), "residual": fit.residual}]
    )


def fit_scan_frame(
    data: ExperimentalDataset,
    model: Optional[PopulationModel] = None,
    populations: Optional[PopulationFit] = None,
    threshold: Optional[ThresholdFit] = None,
) -> pd.DataFrame:
    columns = {"z_um": data.z_um, "n_out": data.n_out, "sigma": data.sigma}
    if model is not None and populations is not None:
        columns["populations_model"] = model.design_at(data.z) @ populations.weights.as_array()
    if threshold is not None:
        columns["threshold_model"] = np.asarray(
            thresholded_curve(data.z, threshold.params.z0, threshold.params.scale), dtype=float
        )
    return pd.DataFrame(columns)
