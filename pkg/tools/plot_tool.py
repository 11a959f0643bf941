import logging
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from analysis.curves import CurveParams, classical_curve, thresholded_curve  # noqa: E402
from analysis.dataset import ExperimentalDataset  # noqa: E402
from analysis.scan import ScanResult  # noqa: E402
from eigensolver.eigensolver import Spectrum  # noqa: E402
from potential.constants import PhysicalConstants  # noqa: E402
from potential.potential import eval_potential  # noqa: E402
from potential.units import to_peV, to_um  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt and no timestamp keep reruns byte-identical
plt.rcParams["svg.hashsalt"] = "neutron-bouncer"
SVG_METADATA = {"Date": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info("wrote %s", path)
    return path


def plot_scan(
    scan: ScanResult,
    path: Path,
    classical: Optional[CurveParams] = None,
    threshold: Optional[CurveParams] = None,
    data: Optional[ExperimentalDataset] = None,
) -> Path:
    """N_out against slit width with the classical and thresholded reference curves."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    slits_um = to_um(scan.slits)
    ax.plot(slits_um, scan.n_out, "o-", label="model N_out")

    z_fine = np.linspace(0.0, scan.slits.max(), 400)
    if classical is not None:
        ax.plot(to_um(z_fine), classical_curve(z_fine, classical.scale), "-", lw=1, label="classical z^1.5")
    if threshold is not None:
        ax.plot(
            to_um(z_fine),
            thresholded_curve(z_fine, threshold.z0, threshold.scale),
            ":",
            lw=1.5,
            label=f"threshold, z0 = {to_um(threshold.z0):.2f} um",
        )
    if data is not None:
        ax.errorbar(data.z_um, data.n_out, yerr=data.sigma, fmt="k.", capsize=2, label="data")

    ax.set_xlabel("slit width (um)")
    ax.set_ylabel("N_out")
    ax.legend(loc="upper left")
    return _save(fig, path)


def plot_spectrum(spectrum: Spectrum, consts: PhysicalConstants, path: Path) -> Path:
    """Potential with each level drawn at its energy and |psi|^2 on top."""
    z = spectrum.grid.points()
    v = eval_potential(spectrum.spec, consts, z)
    energies = to_peV(spectrum.energies)
    top = energies[-1] * 1.5

    fig, ax = plt.subplots(figsize=(7, 4.5))
    finite = np.isfinite(v)
    ax.plot(to_um(z[finite]), np.minimum(to_peV(v[finite]), top), "k-", lw=1, label="V(z)")
    spacing = np.min(np.diff(energies)) if len(energies) > 1 else energies[0]
    for state, energy in zip(spectrum.states, energies):
        density = state.density / state.density.max() * 0.8 * spacing
        ax.axhline(energy, color="0.7", lw=0.5)
        ax.plot(to_um(z), energy + density, lw=1, label=f"n = {state.index}: {energy:.3f} peV")

    ax.set_ylim(0.0, top)
    ax.set_xlabel("height (um)")
    ax.set_ylabel("energy (peV)")
    ax.legend(loc="lower right", fontsize="small")
    return _save(fig, path)
