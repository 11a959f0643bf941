from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

THROUGHPUT_POWER = 1.5


class CurveParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    scale: float = Field(description="Amplitude, counts per m^1.5")
    z0: Optional[float] = Field(None, ge=0, description="Transparency threshold (m)")


def classical_curve(z, scale: float):
    """Classical throughput, scale * z^1.5."""
    z = np.asarray(z, dtype=float)
    out = scale * z**THROUGHPUT_POWER
    return float(out) if out.ndim == 0 else out


def thresholded_curve(z, z0: float, scale: float):
    """Ground-state throughput scale * (z - z0)^1.5, exactly zero for z <= z0."""
    z = np.asarray(z, dtype=float)
    gap = np.clip(z - z0, 0.0, None)
    out = np.where(z > z0, scale * gap**THROUGHPUT_POWER, 0.0)
    return float(out) if out.ndim == 0 else out
