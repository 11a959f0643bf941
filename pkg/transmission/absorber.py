from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from potential.units import to_um


class ConstantDensity(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal["constant"] = "constant"
    value: float = Field(0.3, ge=0)

    def __call__(self, slit: float) -> float:
        return self.value


class PowerLawDensity(BaseModel):
    """N_max(z) = scale * (z / 1 um) ** exponent."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["power_law"] = "power_law"
    scale: float = Field(ge=0)
    exponent: float

    def __call__(self, slit: float) -> float:
        return self.scale * to_um(slit) ** self.exponent


EntranceDensity = Annotated[Union[ConstantDensity, PowerLawDensity], Field(discriminator="kind")]


class AbsorberModel(BaseModel):
    """Absorption step, cavity length (both metres) and entrance density N_max(z)."""

    model_config = ConfigDict(frozen=True)

    delta_x: float = Field(gt=0)
    cavity_length: float = Field(gt=0)
    n_max_model: EntranceDensity = Field(default_factory=ConstantDensity)

    @model_validator(mode="after")
    def check_step(self):
        if self.delta_x > self.cavity_length:
            raise ValueError(
                f"absorption step {self.delta_x} m exceeds cavity length {self.cavity_length} m"
            )
        return self

    def n_max(self, slit: float) -> float:
        return self.n_max_model(slit)
