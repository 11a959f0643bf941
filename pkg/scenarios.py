import json
import logging
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from analysis.curves import CurveParams
from analysis.dataset import ExperimentalDataset
from analysis.density import PopulationWeights
from analysis.fitting import fit_populations, fit_threshold_curve
from analysis.scan import PopulationModel, ScanResult, predict_scan
from eigensolver.eigensolver import solve_spectrum
from potential.units import cm, to_cm, um
from tools.config_tool import RunConfig
from tools.dataset_tool import load_dataset
from tools.export_tool import (
    density_frame,
    fit_scan_frame,
    length_sweep_frame,
    populations_frame,
    scan_frame,
    spectrum_frame,
    threshold_frame,
    write_csv,
)
from tools.plot_tool import plot_scan, plot_spectrum
from transmission.transmission import (
    absorption_fraction,
    infer_k,
    step_from_overlap,
    theoretical_area,
    transmitted_count,
)
from utils.errors import (
    BouncerError,
    ConfigError,
    InconsistentDataError,
    InfiniteAttenuationError,
    UnfittableDataError,
)
from utils.markdown import markdown_table, to_markdown

logger = logging.getLogger(__name__)

########## Published reference values ##########
PRINTED_AREA_15UM = 0.0173
PRINTED_K_PER_CM = 0.54991
PRINTED_DELTA_X_CM = 0.0320259
PRINTED_N_MAX = 0.3
PRINTED_LENGTH_CM = 10.0
# slit um -> (simulated area, theoretical area)
PRINTED_AREAS = {15.0: (0.0173, 0.0173), 20.0: (0.0252, 0.01245), 30.0: (0.0031, 0.08333)}


def _deviation(value: float, reference: float) -> float:
    if not math.isfinite(reference) or reference == 0:
        return math.nan
    return value / reference - 1.0


def _reference_curves(scan: ScanResult):
    """Classical and thresholded curves fitted to the predicted counts, for the plot."""
    z = scan.slits
    y = scan.n_out
    basis = z**1.5
    classical = CurveParams(scale=float(basis @ y / (basis @ basis)))
    threshold = None
    if len(scan.rows) >= 3:
        predicted = ExperimentalDataset(z_um=z * 1e6, n_out=y, sigma=np.ones_like(y))
        try:
            threshold = fit_threshold_curve(predicted).params
        except UnfittableDataError as e:
            logger.info("no threshold overlay: %s", e.message)
    return classical, threshold


########## Scenarios ##########
def run_spectrum(config: RunConfig, out_dir: Path) -> Dict[str, Path]:
    consts = config.physical_constants()
    spec = config.potential_spec()
    n_states = config.potential.n_states
    grid = config.grid_policy().grid_for(spec, consts, n_states)
    spectrum = solve_spectrum(spec, consts, grid, n_states)

    frame = spectrum_frame(spectrum, consts)
    print(markdown_table(list(frame.columns), frame.itertuples(index=False)))
    return {
        "spectrum": write_csv(frame, out_dir / "spectrum.csv"),
        "densities": write_csv(density_frame(spectrum, config.population_weights()), out_dir / "densities.csv"),
        "plot": plot_spectrum(spectrum, consts, out_dir / "spectrum.svg"),
    }


def _scan(config: RunConfig, slits: List[float], weights: PopulationWeights) -> ScanResult:
    return predict_scan(
        config.absorber_family(),
        config.physical_constants(),
        config.grid_policy(),
        config.absorber_model(),
        weights,
        slits,
        workers=config.scan.workers,
    )


def run_scan(config: RunConfig, out_dir: Path) -> Dict[str, Path]:
    scan = _scan(config, config.slits(), config.population_weights())
    data = load_dataset(config.fit.data) if config.fit.data is not None else None

    frame = scan_frame(scan)
    print(markdown_table(list(frame.columns), frame.itertuples(index=False)))
    if scan.non_monotone:
        print(f"N_out decreases between slits (um): {[(a * 1e6, b * 1e6) for a, b in scan.non_monotone]}")

    classical, threshold = _reference_curves(scan)
    artifacts = {
        "scan": write_csv(frame, out_dir / "scan.csv"),
        "plot": plot_scan(scan, out_dir / "scan.svg", classical=classical, threshold=threshold, data=data),
    }
    if config.scan.lengths:
        lengths = [cm(length) for length in config.scan.lengths]
        artifacts["length_sweep"] = write_csv(length_sweep_frame(scan, lengths), out_dir / "length_sweep.csv")
    return artifacts


def run_fit(config: RunConfig, out_dir: Path) -> Dict[str, Path]:
    data = load_dataset(config.fit.data)
    report = {}
    artifacts = {}
    model = populations = threshold = None

    if config.fit.mode in ("populations", "both"):
        scan = _scan(config, list(data.z), PopulationWeights.uniform())
        model = PopulationModel.from_scan(scan)
        populations = fit_populations(data, model)
        report["populations"] = {"C": list(populations.weights.c), "residual": populations.residual}
        artifacts["populations"] = write_csv(populations_frame(populations), out_dir / "populations.csv")

    if config.fit.mode in ("threshold", "both"):
        threshold = fit_threshold_curve(data, resolution=um(config.fit.z0_resolution))
        report["threshold"] = {
            "scale": threshold.params.scale,
            "z0_um": threshold.params.z0 * 1e6,
            "residual": threshold.residual,
        }
        artifacts["threshold"] = write_csv(threshold_frame(threshold), out_dir / "threshold.csv")

    artifacts["fit_scan"] = write_csv(fit_scan_frame(data, model, populations, threshold), out_dir / "fit_scan.csv")
    print(to_markdown(report))
    return artifacts


def appendix_chain() -> pd.DataFrame:
    """The area -> k -> dx -> N_out chain from the printed values, with residuals."""
    k = PRINTED_K_PER_CM / cm(1.0)
    length = cm(PRINTED_LENGTH_CM)
    delta_x = step_from_overlap(PRINTED_AREA_15UM, k)
    n_out = transmitted_count(PRINTED_N_MAX, k, length)
    k_back = infer_k(n_out, PRINTED_N_MAX, length)
    area = absorption_fraction(k, cm(PRINTED_DELTA_X_CM))

    records = [
        ("delta_x_cm", to_cm(delta_x), PRINTED_DELTA_X_CM),
        ("area_from_printed_k_and_delta_x", area, PRINTED_AREA_15UM),
        ("N_out", n_out, math.nan),
        ("k_percm_from_N_out", k_back * cm(1.0), PRINTED_K_PER_CM),
    ]
    return pd.DataFrame.from_records(
        [(q, v, p, _deviation(v, p)) for q, v, p in records],
        columns=["quantity", "value", "printed_value", "relative_deviation"],
    )


def run_appendix(config: RunConfig, out_dir: Path) -> Dict[str, Path]:
    chain = appendix_chain()
    for quantity, value, printed, deviation in chain.itertuples(index=False):
        if math.isfinite(deviation) and abs(deviation) > 1e-9:
            logger.warning("%s = %.6g deviates from the printed %.6g by %+.2f%%", quantity, value, printed, 100 * deviation)

    absorber = config.absorber_model()
    slits_um = config.scan.slits_um()
    scan = _scan(config, [um(s) for s in slits_um], PopulationWeights.ground_state())
    data = load_dataset(config.fit.data) if config.fit.data is not None else None

    records = []
    for slit_um, row in zip(slits_um, scan.rows):
        printed_sim, printed_theory = PRINTED_AREAS.get(slit_um, (math.nan, math.nan))
        data_theory = math.nan
        if data is not None:
            match = np.flatnonzero(np.isclose(data.z_um, slit_um))
            if match.size:
                n_out = float(data.n_out[match[0]])
                try:
                    data_theory = theoretical_area(
                        n_out, absorber.n_max(row.slit), absorber.cavity_length, absorber.delta_x
                    )
                except InfiniteAttenuationError:
                    logger.warning("slit %g um: zero count, writing total absorption (area 1)", slit_um)
                    data_theory = 1.0
                except InconsistentDataError as e:
                    logger.warning("slit %g um: %s, writing nan", slit_um, e.message)
        records.append(
            {
                "slit_um": slit_um,
                "simulated_area": row.areas[0],
                "printed_simulated_area": printed_sim,
                "printed_theoretical_area": printed_theory,
                "data_theoretical_area": data_theory,
                "k1_percm": row.ks[0] * cm(1.0),
                "N_out": row.n_out,
            }
        )
    areas = pd.DataFrame.from_records(records)

    print("## Appendix chain\n")
    print(markdown_table(list(chain.columns), chain.itertuples(index=False)))
    print("## Areas inside the absorber\n")
    print(markdown_table(list(areas.columns), areas.itertuples(index=False)))
    return {
        "chain": write_csv(chain, out_dir / "appendix_chain.csv"),
        "areas": write_csv(areas, out_dir / "appendix_areas.csv"),
    }


SCENARIOS = {
    "spectrum": run_spectrum,
    "scan": run_scan,
    "fit": run_fit,
    "appendix": run_appendix,
}


def report_error(error: BouncerError, stream=None) -> int:
    """Write one JSON line describing the failure and return its exit code."""
    stream = stream or sys.stderr
    print(json.dumps(error.to_record(), default=str, sort_keys=True), file=stream)
    return error.exit_code


def run(config: RunConfig, out_dir: Optional[Path] = None) -> int:
    """Dispatch the configured scenario; 0 on success, the error's exit code otherwise."""
    out_dir = Path(out_dir or config.output.dir)
    logger.info("running %s into %s", config.scenario, out_dir)
    try:
        artifacts = SCENARIOS[config.scenario](config, out_dir)
    except BouncerError as e:
        return report_error(e)
    except ValueError as e:
        # Precondition violations from library calls, including pydantic ValidationError
        return report_error(ConfigError(str(e)))
    for name, path in artifacts.items():
        logger.info("%s: %s", name, path)
    return 0
