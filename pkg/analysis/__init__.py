from .curves import CurveParams, classical_curve, thresholded_curve
from .dataset import ExperimentalDataset
from .density import PopulationWeights, mixed_density
from .fitting import PopulationFit, ThresholdFit, fit_populations, fit_threshold_curve
from .scan import (
    AbsorberFamily,
    PopulationModel,
    ScanResult,
    ScanRow,
    cavity_length_sweep,
    predict_scan,
)
