from .absorber import AbsorberModel, ConstantDensity, EntranceDensity, PowerLawDensity
from .transmission import (
    OverlapResult,
    absorber_overlap,
    absorption_fraction,
    infer_k,
    k_from_overlap,
    overlaps,
    step_from_overlap,
    theoretical_area,
    transmitted_count,
)
