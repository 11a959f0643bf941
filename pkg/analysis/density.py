from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from eigensolver.eigensolver import Spectrum
from utils.errors import ArityError

# Power on the last population term; 2 is the only normalisable choice
FOURTH_TERM_POWER = 2


class PopulationWeights(BaseModel):
    """Level populations C_1..C_4 on the probability simplex."""

    model_config = ConfigDict(frozen=True)

    c: Tuple[float, float, float, float]

    @field_validator("c")
    @classmethod
    def check_simplex(cls, c):
        if any(ci < 0 for ci in c):
            raise ValueError(f"populations must be non-negative, got {c}")
        if abs(sum(c) - 1.0) > 1e-12:
            raise ValueError(f"populations must sum to 1, got {sum(c)!r}")
        return c

    @classmethod
    def ground_state(cls) -> "PopulationWeights":
        return cls(c=(1.0, 0.0, 0.0, 0.0))

    @classmethod
    def uniform(cls) -> "PopulationWeights":
        return cls(c=(0.25, 0.25, 0.25, 0.25))

    def as_array(self) -> np.ndarray:
        return np.array(self.c)


def mixed_density(spectrum: Spectrum, weights: PopulationWeights) -> np.ndarray:
    """Pointwise sum of C_i |psi_i|^2 over the spectrum's grid."""
    if len(spectrum) < len(weights.c):
        raise ArityError(
            f"{len(weights.c)} populations need at least as many states, spectrum has {len(spectrum)}",
            n_states=len(spectrum),
        )
    density = np.zeros(spectrum.grid.n_points)
    last = len(weights.c) - 1
    for i, ci in enumerate(weights.c):
        power = FOURTH_TERM_POWER if i == last else 2
        density += ci * np.abs(spectrum[i].psi) ** power
    return density
