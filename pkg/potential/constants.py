import os

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

# Lets a .env file or the shell override the CODATA defaults below
load_dotenv(override=True)

ELEMENTARY_CHARGE = 1.602176634e-19
JOULES_PER_PEV = ELEMENTARY_CHARGE * 1e-12


class PhysicalConstants(BaseModel):
    """Constants of the neutron-in-gravity problem, SI units."""

    model_config = ConfigDict(frozen=True)

    hbar: float = Field(1.054571817e-34, gt=0, description="Reduced Planck constant (J s)")
    m_n: float = Field(1.674927498e-27, gt=0, description="Neutron mass (kg)")
    g: float = Field(9.80665, gt=0, description="Gravitational acceleration (m/s^2)")
    peV_per_J: float = Field(1.0 / JOULES_PER_PEV, gt=0, description="Pico-electronvolts per joule")

    @property
    def eps0(self) -> float:
        """Gravitational energy scale (hbar^2 m g^2 / 2)^(1/3) in joules."""
        return (self.hbar**2 * self.m_n * self.g**2 / 2.0) ** (1.0 / 3.0)

    @property
    def length_scale(self) -> float:
        """Gravitational length l0 = (hbar^2 / (2 m^2 g))^(1/3), so eps0 = m g l0."""
        return (self.hbar**2 / (2.0 * self.m_n**2 * self.g)) ** (1.0 / 3.0)

    @property
    def weight(self) -> float:
        """m_n * g, the gravitational force in newtons."""
        return self.m_n * self.g


def constants_from_env() -> PhysicalConstants:
    overrides = {}
    for field, env_name in (("hbar", "BOUNCER_HBAR"), ("m_n", "BOUNCER_NEUTRON_MASS"), ("g", "BOUNCER_G")):
        value = os.getenv(env_name)
        if value:
            overrides[field] = float(value)
    return PhysicalConstants(**overrides)


DEFAULT_CONSTANTS = constants_from_env()
