from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import List, Literal, Optional

from ris_kit.schemas.ga import GaConfig
from ris_kit.schemas.scenario import ScenarioConfig, is_perfect_square

SweepVariable = Literal["transmit_power_dbm", "M", "N", "MN", "d_ib"]
SweepMode = Literal["optimal_ga", "random_phase", "no_ris", "mc_check"]


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    variable: SweepVariable
    values: List[float] = Field(min_length=1)
    modes: List[SweepMode] = Field(min_length=1)
    base: ScenarioConfig
    ga: GaConfig = Field(default_factory=GaConfig)
    generation_factor: Optional[int] = Field(default=None, ge=0)
    phase_draws: int = Field(default=200, ge=10)
    mc_trials: int = Field(default=10_000, ge=100)

    @field_validator("values")
    @classmethod
    def strictly_increasing(cls, v):
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("sweep values must be strictly increasing")
        return v

    @field_validator("modes")
    @classmethod
    def unique_modes(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("sweep modes must not repeat")
        return v

    @model_validator(mode="after")
    def dimensions_are_squares(self):
        if self.variable in ("M", "N", "MN"):
            for value in self.values:
                if value != int(value) or not is_perfect_square(int(value)):
                    raise ValueError(f"{self.variable} sweep value {value} is not a perfect square")
        if self.variable == "d_ib":
            if any(value <= 0 for value in self.values):
                raise ValueError("d_ib sweep values must be > 0")
            if not self.base.uses_geometry:
                raise ValueError("d_ib sweeps need a geometric base config (d_ui, d_ib)")
        return self


class ResultRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    optimal_ga: Optional[float] = None
    random_phase: Optional[float] = None
    no_ris: Optional[float] = None
    mc_estimate: Optional[float] = None
    mc_std_error: Optional[float] = None
    seed: int
    wall_time: Optional[float] = None


RESULT_CSV_HEADER = (
    "value", "optimal_ga", "random_phase", "no_ris", "mc_estimate", "mc_std_error", "seed",
)
