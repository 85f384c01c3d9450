from dataclasses import dataclass, field
from typing import Dict, List
import numpy as np


@dataclass
class GaState:
    """Population of phase chromosomes, row t is individual t"""
    chromosomes: np.ndarray  # (P, N)
    fitness: np.ndarray      # (P,)
    generation: int = 0

    @property
    def size(self) -> int:
        return int(self.chromosomes.shape[0])

    @property
    def best_index(self) -> int:
        # argmax returns the lowest index among ties
        return int(np.argmax(self.fitness))


@dataclass
class GaTrace:
    generations: List[int] = field(default_factory=list)
    best_fitness: List[float] = field(default_factory=list)
    mean_fitness: List[float] = field(default_factory=list)
    snapshots: Dict[int, np.ndarray] = field(default_factory=dict)

    def record(self, state: GaState, snapshot: bool = False) -> None:
        self.generations.append(state.generation)
        self.best_fitness.append(float(np.max(state.fitness)))
        self.mean_fitness.append(float(np.mean(state.fitness)))
        if snapshot:
            self.snapshots[state.generation] = state.chromosomes[state.best_index].copy()

    def csv_rows(self):
        return zip(self.generations, self.best_fitness, self.mean_fitness)


GA_TRACE_CSV_HEADER = ("generation", "best_fitness", "mean_fitness")
