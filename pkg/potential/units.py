from potential.constants import JOULES_PER_PEV

MICRON = 1e-6
CENTIMETER = 1e-2


def to_peV(energy):
    """Joules to pico-electronvolts."""
    return energy / JOULES_PER_PEV


def from_peV(energy_peV):
    """Pico-electronvolts to joules."""
    return energy_peV * JOULES_PER_PEV


def um(length_um):
    return length_um * MICRON


def to_um(length):
    return length / MICRON


def cm(length_cm):
    return length_cm * CENTIMETER


def to_cm(length):
    return length / CENTIMETER
