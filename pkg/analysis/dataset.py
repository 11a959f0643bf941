from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from potential.units import um
from utils.errors import DataError


@dataclass(frozen=True)
class ExperimentalDataset:
    """Measured output counts against slit width; z in micrometres."""

    z_um: np.ndarray
    n_out: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        if not (len(self.z_um) == len(self.n_out) == len(self.sigma)):
            raise DataError("dataset columns differ in length")
        if np.any(np.diff(self.z_um) <= 0):
            raise DataError("slit widths must be strictly increasing")
        if np.any(self.n_out < 0):
            raise DataError("counts must be non-negative")
        if np.any(self.sigma <= 0):
            raise DataError("uncertainties must be positive")

    def __len__(self) -> int:
        return len(self.z_um)

    @property
    def z(self) -> np.ndarray:
        """Slit widths in metres."""
        return um(self.z_um)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[Optional[float]]]) -> "ExperimentalDataset":
        """Rows of (z_um, n_out[, sigma]) in any order; sigma defaults to 1."""
        parsed = []
        for row in rows:
            z_um, n_out = float(row[0]), float(row[1])
            sigma = float(row[2]) if len(row) > 2 and row[2] is not None else 1.0
            parsed.append((z_um, n_out, sigma))
        parsed.sort(key=lambda r: r[0])
        for (z_a, _, _), (z_b, _, _) in zip(parsed, parsed[1:]):
            if z_a == z_b:
                raise DataError(f"duplicate slit width {z_a:g} um", z_um=z_a)
        arr = np.array(parsed, dtype=float).reshape(-1, 3)
        return cls(z_um=arr[:, 0], n_out=arr[:, 1], sigma=arr[:, 2])
