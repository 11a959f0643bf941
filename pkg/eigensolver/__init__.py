from .analytic import (
    AIRY_ZEROS,
    airy_zero,
    airy_zero_estimate,
    box_eigenvalue_analytic,
    gravity_eigenvalue_analytic,
    gravity_wavefunction_analytic,
)
from .eigensolver import EigenState, GridPolicy, Spectrum, count_nodes, solve_spectrum
