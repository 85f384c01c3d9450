from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Optional


class GaConfig(BaseModel):
    """Genetic algorithm settings; defaults reproduce the published scheme"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    population: int = Field(default=200, ge=2)
    elites: int = Field(default=10, ge=1)
    culled: int = Field(default=40, ge=0)
    parents: int = Field(default=300, ge=0)
    crossover_offspring: int = Field(default=150, ge=0)
    mutation_prob: float = Field(default=0.1, ge=0.0, le=1.0)
    max_generations: Optional[int] = Field(default=None, ge=0)
    generation_factor: int = Field(default=100, ge=0)
    stagnation_window: Optional[int] = Field(default=None, ge=1)
    snapshot_every: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def sizes_must_add_up(self):
        if self.elites + self.culled + self.crossover_offspring != self.population:
            raise ValueError(
                f"elites + culled + crossover_offspring must equal population "
                f"({self.elites} + {self.culled} + {self.crossover_offspring} != {self.population})"
            )
        if self.parents % 2:
            raise ValueError("parents must be even (paired for crossover)")
        if self.parents != 2 * self.crossover_offspring:
            raise ValueError("each parent pair yields one child: parents must be 2 * crossover_offspring")
        if self.population - self.elites - self.culled < 1 and self.crossover_offspring > 0:
            raise ValueError("no individuals left to select crossover parents from")
        return self

    def generations_for(self, N: int) -> int:
        if self.max_generations is not None:
            return self.max_generations
        return self.generation_factor * N
