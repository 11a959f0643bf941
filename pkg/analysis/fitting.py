import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from analysis.curves import CurveParams, thresholded_curve
from analysis.dataset import ExperimentalDataset
from analysis.density import PopulationWeights
from analysis.scan import PopulationModel
from potential.units import um
from utils.errors import UnfittableDataError

logger = logging.getLogger(__name__)

# Deterministic starting points on the 4-simplex
SIMPLEX_STARTS: Tuple[Tuple[float, float, float, float], ...] = (
    (0.25, 0.25, 0.25, 0.25),
    (1.0, 0.0, 0.0, 0.0),
    (0.0, 1.0, 0.0, 0.0),
    (0.0, 0.0, 1.0, 0.0),
    (0.0, 0.0, 0.0, 1.0),
    (0.4, 0.3, 0.2, 0.1),
    (0.1, 0.2, 0.3, 0.4),
    (0.7, 0.1, 0.1, 0.1),
)
MAX_ITERATIONS = 200_000
KKT_TOLERANCE = 1e-14


@dataclass(frozen=True)
class PopulationFit:
    weights: PopulationWeights
    residual: float


@dataclass(frozen=True)
class ThresholdFit:
    params: CurveParams
    residual: float


def _check_fittable(data: ExperimentalDataset, min_rows: int):
    if len(data) < min_rows:
        raise UnfittableDataError(f"need at least {min_rows} data rows, got {len(data)}", rows=len(data))
    if not np.any(data.n_out > 0):
        raise UnfittableDataError("every count is zero; nothing constrains the fit")


def _descend(q: np.ndarray, r: np.ndarray, c: np.ndarray, tol: float) -> np.ndarray:
    """
    Minimise c.Q.c - 2 r.c on the simplex by pairwise coordinate moves.

    Each step shifts mass from the occupied coordinate with the largest
    gradient to the coordinate with the smallest one, with exact line search
    clipped to the simplex. Stops when the KKT gap falls below tol.
    """
    c = c.copy()
    grad = q @ c - r
    for _ in range(MAX_ITERATIONS):
        i = int(np.argmin(grad))
        occupied = np.flatnonzero(c > 0)
        j = int(occupied[np.argmax(grad[occupied])])
        gap = grad[j] - grad[i]
        if gap <= tol or i == j:
            break
        curvature = q[i, i] + q[j, j] - 2.0 * q[i, j]
        step = c[j] if curvature <= 0 else min(c[j], gap / curvature)
        c[i] += step
        c[j] -= step
        grad += step * (q[:, i] - q[:, j])
    else:
        logger.warning("population fit stopped after %d iterations, KKT gap %.3g", MAX_ITERATIONS, gap)
    return c


def _project(c: np.ndarray) -> np.ndarray:
    c = np.clip(c, 0.0, None)
    return c / c.sum()


def fit_populations(data: ExperimentalDataset, model: PopulationModel) -> PopulationFit:
    """
    Level populations minimising sum(((M C - n_out) / sigma)^2) over the simplex.

    model must hold predictions for every slit in data; runs a deterministic
    multi-start and keeps the lowest residual.
    """
    _check_fittable(data, min_rows=4)
    design = model.design_at(data.z)
    w = 1.0 / data.sigma
    a = design * w[:, None]
    b = data.n_out * w
    q = a.T @ a
    r = a.T @ b
    tol = KKT_TOLERANCE * max(np.abs(q).max(), np.abs(r).max(), 1e-300)

    best = None
    for start in SIMPLEX_STARTS:
        c = _project(_descend(q, r, np.array(start), tol))
        residual = float(np.sum((a @ c - b) ** 2))
        logger.debug("start %s -> C=%s residual=%.6g", start, np.round(c, 6), residual)
        if best is None or residual < best[1]:
            best = (c, residual)

    c, residual = best
    return PopulationFit(weights=PopulationWeights(c=tuple(float(ci) for ci in c)), residual=residual)


def fit_threshold_curve(data: ExperimentalDataset, resolution: float = um(0.05)) -> ThresholdFit:
    """
    Least-squares (scale, z0) for the thresholded curve.

    z0 is scanned on a uniform grid of the given resolution (metres) over
    [z_lo, max z], where z_lo is the largest zero-count slit below the first
    non-zero count; the scale has a closed form for each z0.
    """
    _check_fittable(data, min_rows=3)
    if resolution <= 0:
        raise ValueError(f"z0 resolution must be positive, got {resolution}")

    z = data.z
    y = data.n_out
    w2 = 1.0 / data.sigma**2

    first_positive = int(np.flatnonzero(y > 0)[0])
    leading_zeros = z[:first_positive]
    z_lo = float(leading_zeros[-1]) if leading_zeros.size else 0.0
    z_hi = float(z[-1])
    n_steps = int(np.floor((z_hi - z_lo) / resolution + 1e-9))
    candidates = z_lo + resolution * np.arange(n_steps + 1)

    best = None
    for z0 in candidates:
        basis = thresholded_curve(z, z0, 1.0)
        denom = float(np.sum(w2 * basis**2))
        if denom == 0.0:
            continue
        scale = float(np.sum(w2 * basis * y)) / denom
        residual = float(np.sum(w2 * (y - scale * basis) ** 2))
        if best is None or residual < best[2]:
            best = (float(z0), scale, residual)

    if best is None:
        raise UnfittableDataError("no threshold leaves a data point above it")
    z0, scale, residual = best
    return ThresholdFit(params=CurveParams(scale=scale, z0=z0), residual=residual)
