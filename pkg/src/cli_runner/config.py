"""JSON run configuration validated with pydantic models."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.charge_model.profile import make_profile
from src.errors import ConfigError
from src.grid_fields.grid import GridSpec
from src.hamiltonian_core.state import Particle
from src.integrator.runge_kutta import RunConfig

logger = logging.getLogger(__name__)

Vector3 = tuple[float, float, float]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, allow_inf_nan=False)


class GridConfig(_Section):
    L: float = Field(16.0, gt=0.0, description="Box side length")
    N: int = Field(48, ge=8, description="Nodes per axis")

    @field_validator("N")
    @classmethod
    def validate_even(cls, v: int) -> int:
        if v % 2:
            raise ValueError(f"N must be even, got {v}")
        return v


class ChargeConfig(_Section):
    R_rho: float = Field(2.0, gt=0.0, description="Support radius of the bump profile")
    Q: float = Field(1.0, description="Total charge")


class ParticleConfig(_Section):
    m: float = Field(1.0, gt=0.0)
    I: float = Field(1.0, gt=0.0)  # noqa: E741
    q0: Vector3 = (0.0, 0.0, 0.0)
    p0: Vector3 = (0.0, 0.0, 0.0)
    pi0: Vector3 = (0.0, 0.0, 0.0)


class FieldsConfig(_Section):
    initial: Literal["zero", "soliton-guess", "random-localized"] = "random-localized"
    seed: int = Field(1, ge=0)
    envelope_radius: float = Field(1.0, gt=0.0)
    amplitude: float = Field(1.0, ge=0.0)
    gauge_perturbation: float = Field(0.0, description="Strength of a gradient added to A")


class RunSection(_Section):
    dt: float | None = Field(None, gt=0.0, description="Time step; null means 0.1 h")
    T: float = Field(5.0, ge=0.0)
    observe_every: int = Field(10, ge=1)
    reproject_gauge: bool = True
    snapshot_every: int = Field(0, ge=0, description="Snapshot cadence in steps, 0 disables")


class CheckTolerances(_Section):
    """Pass thresholds of the audit, keyed by report name."""

    gauge: float = 1e-9
    gauss: float = 1e-10
    structure: float = 1e-12
    gradient: float = 1e-6
    form_equivalence: float = 1e-10
    canonical: float = 1e-10
    momentum_map: float = 1e-8
    definitional: float = 1e-12
    rotation: float = 1e-11
    classical: float = 1e-6
    lie_derivative: float = 1e-5
    newton_lorentz: float = 1e-3


class ChecksConfig(_Section):
    tolerances: CheckTolerances = Field(default_factory=CheckTolerances)


class SimConfig(_Section):
    """Complete description of one simulation or audit."""

    grid: GridConfig = Field(default_factory=GridConfig)
    charge: ChargeConfig = Field(default_factory=ChargeConfig)
    particle: ParticleConfig = Field(default_factory=ParticleConfig)
    fields: FieldsConfig = Field(default_factory=FieldsConfig)
    run: RunSection = Field(default_factory=RunSection)
    checks: ChecksConfig = Field(default_factory=ChecksConfig)

    @model_validator(mode="after")
    def validate_margin(self) -> SimConfig:
        h = self.grid.L / self.grid.N
        limit = self.grid.L / 2 - 2 * h
        if self.fields.envelope_radius + self.charge.R_rho >= limit:
            raise ValueError(
                f"envelope_radius + R_rho = {self.fields.envelope_radius + self.charge.R_rho:g} "
                f"must stay below L/2 - 2h = {limit:g}"
            )
        return self

    def grid_spec(self) -> GridSpec:
        return GridSpec(L=self.grid.L, N=self.grid.N)

    def build_particle(self, grid: GridSpec | None = None) -> Particle:
        grid = grid if grid is not None else self.grid_spec()
        profile = make_profile(self.charge.R_rho, self.charge.Q, grid)
        return Particle(profile, m=self.particle.m, I=self.particle.I)

    def run_config(self) -> RunConfig:
        dt = self.run.dt if self.run.dt is not None else 0.1 * self.grid.L / self.grid.N
        return RunConfig(
            dt=dt,
            T=self.run.T,
            observe_every=self.run.observe_every,
            reproject_gauge=self.run.reproject_gauge,
        )

    def with_seed(self, seed: int) -> SimConfig:
        return self.model_copy(update={"fields": self.fields.model_copy(update={"seed": seed})})


def _line_of(text: str, loc: tuple) -> int:
    """1-based line of the deepest key of `loc` found in document order."""
    pos = 0
    for key in loc:
        if not isinstance(key, str):
            continue
        found = text.find(f'"{key}"', pos)
        if found < 0:
            break
        pos = found
    return text.count("\n", 0, pos) + 1


def parse_config(text: str) -> SimConfig:
    """
    Validate a JSON document.

    Raises:
        ConfigError: on syntax errors, unknown keys or out-of-range values
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno) from exc
    try:
        return SimConfig.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = tuple(first["loc"])
        where = ".".join(str(k) for k in loc)
        message = f"{where}: {first['msg']}" if where else first["msg"]
        raise ConfigError(message, _line_of(text, loc)) from exc


def load_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    config = parse_config(text)
    logger.debug("Loaded configuration from %s", path)
    return config
