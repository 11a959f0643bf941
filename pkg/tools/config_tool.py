import io
import logging
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from dotenv.parser import parse_stream
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from analysis.density import PopulationWeights
from analysis.scan import AbsorberFamily
from eigensolver.eigensolver import TRUNCATION_FRACTION, GridPolicy
from potential.constants import DEFAULT_CONSTANTS, PhysicalConstants
from potential.potential import GravityFloor, InfiniteBox
from potential.units import cm, from_peV, um
from transmission.absorber import AbsorberModel, ConstantDensity, PowerLawDensity
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

Scenario = Literal["spectrum", "scan", "fit", "appendix"]
COMMAND_LINE = "command line"


def _split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


CommaFloats = Annotated[List[float], BeforeValidator(_split_list)]


########## Config sections (boundary units: um, peV, cm) ##########
class Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class PotentialConfig(Section):
    kind: Literal["box", "gravity", "gravity_absorber", "tabulated"] = "gravity"
    n_states: int = Field(4, ge=1)
    box_width: float = Field(15.0, gt=0, description="um")
    slit: float = Field(15.0, gt=0, description="um, gravity_absorber spectrum only")
    v0: float = Field(0.5, gt=0, description="peV")
    diffuseness: float = Field(0.5, gt=0, description="um")
    wall_offset: float = Field(0.0, description="um")
    table: Optional[Path] = Field(None, description="CSV z_um,V_peV")

    @model_validator(mode="after")
    def check_table(self):
        if self.kind == "tabulated" and self.table is None:
            raise ValueError("potential.table is required for the tabulated potential")
        return self


class ConstantsConfig(Section):
    hbar: float = Field(DEFAULT_CONSTANTS.hbar, gt=0)
    m_n: float = Field(DEFAULT_CONSTANTS.m_n, gt=0)
    g: float = Field(DEFAULT_CONSTANTS.g, gt=0)


class GridConfig(Section):
    n_points: int = Field(4000, ge=16)
    margin: float = Field(4.0, gt=1.0 / TRUNCATION_FRACTION)
    z_max: Optional[float] = Field(None, gt=0, description="um")


class AbsorberConfig(Section):
    delta_x: float = Field(0.0320259, gt=0, description="cm")
    length: float = Field(10.0, gt=0, description="cm")
    n_max: float = Field(0.3, ge=0)
    n_max_exponent: float = 0.0

    @model_validator(mode="after")
    def check_step(self):
        if self.delta_x > self.length:
            raise ValueError(f"delta_x ({self.delta_x} cm) exceeds the cavity length ({self.length} cm)")
        return self


class ScanConfig(Section):
    slits: Optional[CommaFloats] = None
    start: Optional[float] = Field(None, gt=0)
    stop: Optional[float] = Field(None, gt=0)
    step: Optional[float] = Field(None, gt=0)
    workers: int = Field(1, ge=1)
    lengths: CommaFloats = Field(default_factory=list, description="cm")

    @field_validator("slits")
    @classmethod
    def check_slits(cls, slits):
        if slits is None:
            return slits
        if not slits:
            raise ValueError("slit list is empty")
        if any(s <= 0 for s in slits):
            raise ValueError("slit widths must be positive")
        if any(b <= a for a, b in zip(slits, slits[1:])):
            raise ValueError("slit widths must be strictly increasing")
        return slits

    @field_validator("lengths")
    @classmethod
    def check_lengths(cls, lengths):
        if any(length <= 0 for length in lengths):
            raise ValueError("cavity lengths must be positive")
        return lengths

    @model_validator(mode="after")
    def check_range(self):
        bounds = (self.start, self.stop, self.step)
        if any(b is not None for b in bounds):
            if self.slits is not None:
                raise ValueError("give either scan.slits or scan.start/stop/step, not both")
            if any(b is None for b in bounds):
                raise ValueError("scan.start, scan.stop and scan.step must be given together")
            if self.stop < self.start:
                raise ValueError("slit range is empty: scan.stop < scan.start")
        return self

    def slits_um(self) -> List[float]:
        if self.slits is not None:
            return list(self.slits)
        if self.start is not None:
            n = int(np.floor((self.stop - self.start) / self.step + 1e-9))
            return [self.start + i * self.step for i in range(n + 1)]
        return [15.0, 20.0, 30.0]


class WeightsConfig(Section):
    c: Annotated[Tuple[float, float, float, float], BeforeValidator(_split_list)] = (1.0, 0.0, 0.0, 0.0)

    @field_validator("c")
    @classmethod
    def check_simplex(cls, c):
        try:
            PopulationWeights(c=c)
        except ValidationError as e:
            raise ValueError(e.errors()[0]["msg"]) from None
        return c


class FitConfig(Section):
    mode: Literal["populations", "threshold", "both"] = "both"
    z0_resolution: float = Field(0.05, gt=0, le=0.1, description="um")
    data: Optional[Path] = None


class OutputConfig(Section):
    dir: Path = Path("out")


class RunConfig(Section):
    scenario: Scenario = "spectrum"
    potential: PotentialConfig = Field(default_factory=PotentialConfig)
    constants: ConstantsConfig = Field(default_factory=ConstantsConfig)
    grid: GridConfig = Field(default_factory=GridConfig)
    absorber: AbsorberConfig = Field(default_factory=AbsorberConfig)
    scan: ScanConfig = Field(default_factory=ScanConfig)
    weights: WeightsConfig = Field(default_factory=WeightsConfig)
    fit: FitConfig = Field(default_factory=FitConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @model_validator(mode="after")
    def check_files(self):
        if self.scenario == "fit":
            if self.fit.data is None:
                raise ValueError("the fit scenario needs a dataset (fit.data or --data)")
            if not self.fit.data.is_file():
                raise ValueError(f"dataset {self.fit.data} does not exist")
        if self.potential.kind == "tabulated" and not self.potential.table.is_file():
            raise ValueError(f"potential table {self.potential.table} does not exist")
        return self

    ########## SI views ##########
    def physical_constants(self) -> PhysicalConstants:
        return PhysicalConstants(hbar=self.constants.hbar, m_n=self.constants.m_n, g=self.constants.g)

    def grid_policy(self) -> GridPolicy:
        z_max = None if self.grid.z_max is None else um(self.grid.z_max)
        return GridPolicy(n_points=self.grid.n_points, margin=self.grid.margin, z_max=z_max)

    def absorber_family(self) -> AbsorberFamily:
        p = self.potential
        return AbsorberFamily(v0=from_peV(p.v0), diffuseness=um(p.diffuseness), wall_offset=um(p.wall_offset))

    def potential_spec(self):
        p = self.potential
        if p.kind == "box":
            return InfiniteBox(width=um(p.box_width))
        if p.kind == "gravity":
            return GravityFloor()
        if p.kind == "gravity_absorber":
            return self.absorber_family()(um(p.slit))
        from tools.dataset_tool import load_potential_table

        return load_potential_table(p.table)

    def absorber_model(self) -> AbsorberModel:
        a = self.absorber
        if a.n_max_exponent == 0:
            density = ConstantDensity(value=a.n_max)
        else:
            density = PowerLawDensity(scale=a.n_max, exponent=a.n_max_exponent)
        return AbsorberModel(delta_x=cm(a.delta_x), cavity_length=cm(a.length), n_max_model=density)

    def population_weights(self) -> PopulationWeights:
        return PopulationWeights(c=self.weights.c)

    def slits(self) -> List[float]:
        return [um(s) for s in self.scan.slits_um()]


########## Parsing ##########
def _nest(flat: Dict[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        parts = key.split(".")
        node = nested
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError("invalid configuration", issues=[f"{key}: conflicts with a scalar key"])
        node[parts[-1]] = value
    return nested


def _parse_flat(text: str) -> Tuple[Dict[str, Any], Dict[str, int]]:
    flat: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    issues: List[str] = []
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            issues.append(f"line {line}: cannot parse {binding.original.string.strip()!r}")
            continue
        if binding.key is None:
            continue
        if binding.value is None:
            issues.append(f"line {line}: {binding.key}: missing '= value'")
            continue
        if binding.key in flat:
            issues.append(f"line {line}: {binding.key}: duplicate key (first set on line {lines[binding.key]})")
            continue
        flat[binding.key] = binding.value
        lines[binding.key] = line
    if issues:
        raise ConfigError("could not parse configuration", issues=issues)
    return flat, lines


def _yaml_lines(node, prefix: str, lines: Dict[str, int]):
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = f"{prefix}{key_node.value}"
            lines[key] = key_node.start_mark.line + 1
            _yaml_lines(value_node, key + ".", lines)


def _parse_yaml(text: str) -> Tuple[Dict[str, Any], Dict[str, int]]:
    try:
        data = yaml.safe_load(text) or {}
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"line {mark.line + 1}: " if mark else ""
        raise ConfigError("could not parse configuration", issues=[f"{where}{e}"]) from e
    if not isinstance(data, dict):
        raise ConfigError("could not parse configuration", issues=["top level must be a mapping"])
    lines: Dict[str, int] = {}
    _yaml_lines(root, "", lines)
    return data, lines


def _line_for(key: str, lines: Dict[str, Union[int, str]]) -> str:
    parts = key.split(".")
    for n in range(len(parts), 0, -1):
        candidate = ".".join(parts[:n])
        if candidate in lines:
            where = lines[candidate]
            return where if isinstance(where, str) else f"line {where}"
    # Section-level errors point at the first key of that section
    inside = [v for k, v in lines.items() if k.startswith(key + ".") and isinstance(v, int)]
    if inside:
        return f"line {min(inside)}"
    return "default"


def _resolve(raw: Dict[str, Any], base: Path, dotted: str):
    section, key = dotted.split(".")
    value = raw.get(section, {}).get(key) if isinstance(raw.get(section), dict) else None
    if value is not None and not Path(value).is_absolute():
        raw[section][key] = str(base / value)


def load_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Read a run configuration and validate it.

    Flat `section.key = value` files (python-dotenv syntax) and nested YAML
    (.yaml/.yml) are accepted. overrides are dotted keys from the command
    line, applied on top. Every problem is reported with its key and line.
    """
    raw: Dict[str, Any] = {}
    lines: Dict[str, Union[int, str]] = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot read configuration {path}: {e}", path=str(path)) from e
        if path.suffix.lower() in (".yaml", ".yml"):
            raw, lines = _parse_yaml(text)
        else:
            flat, lines = _parse_flat(text)
            raw = _nest(flat)
        for dotted in ("potential.table", "fit.data"):
            _resolve(raw, path.parent, dotted)
        logger.info("loaded configuration %s (%d keys)", path, len(lines))

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        node = raw
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
        lines[key] = COMMAND_LINE

    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        issues = []
        for err in e.errors():
            key = ".".join(str(p) for p in err["loc"]) or "<config>"
            issues.append(f"{_line_for(key, lines)}: {key}: {err['msg']}")
        raise ConfigError("invalid configuration", issues=issues) from e
