import math

import numpy as np
from scipy.special import airy

from potential.constants import PhysicalConstants
from utils.errors import UnsupportedIndexError

# |a_n| for the first ten zeros of Ai
AIRY_ZEROS = (
    2.33810741,
    4.08794944,
    5.52055983,
    6.78670809,
    7.94413359,
    9.02265085,
    10.04017434,
    11.00852430,
    11.93601556,
    12.82877675,
)


def box_eigenvalue_analytic(n: int, a: float, consts: PhysicalConstants) -> float:
    """E_n = hbar^2 pi^2 n^2 / (2 m a^2) for a box of width a (m), in joules."""
    if n < 1:
        raise ValueError(f"state index must be >= 1, got {n}")
    if a <= 0:
        raise ValueError(f"box width must be positive, got {a}")
    return consts.hbar**2 * math.pi**2 * n**2 / (2.0 * consts.m_n * a**2)


def airy_zero(n: int) -> float:
    if not 1 <= n <= len(AIRY_ZEROS):
        raise UnsupportedIndexError(
            f"Airy zero table covers n = 1..{len(AIRY_ZEROS)}, got {n}", index=n
        )
    return AIRY_ZEROS[n - 1]


def airy_zero_estimate(n: int) -> float:
    """Table value where available, asymptotic expansion beyond it."""
    if 1 <= n <= len(AIRY_ZEROS):
        return AIRY_ZEROS[n - 1]
    t = 3.0 * math.pi / 8.0 * (4 * n - 1)
    return t ** (2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t**2))


def gravity_eigenvalue_analytic(n: int, consts: PhysicalConstants) -> float:
    """Bouncer level E_n = eps0 |a_n| in joules, n = 1..10."""
    return consts.eps0 * airy_zero(n)


def gravity_wavefunction_analytic(n: int, consts: PhysicalConstants, z) -> np.ndarray:
    """Normalised bouncer eigenfunction Ai(z/l0 - |a_n|), zero below the mirror."""
    a_n = airy_zero(n)
    l0 = consts.length_scale
    z = np.asarray(z, dtype=float)
    ai, _, _, _ = airy(z / l0 - a_n)
    _, aip_at_mirror, _, _ = airy(-a_n)
    psi = ai / (math.sqrt(l0) * abs(aip_at_mirror))
    return np.where(z < 0, 0.0, psi)
