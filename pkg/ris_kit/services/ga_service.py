import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from ris_kit.models.channel import PhaseShifts, TWO_PI
from ris_kit.models.ga import GaState, GaTrace
from ris_kit.models.scenario import Scenario
from ris_kit.schemas.ga import GaConfig
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.utils.error_handlers import ScenarioValidationError
from ris_kit.utils.parallel import ordered_map
from ris_kit.utils.rng import GA_STREAM, substream

logger = logging.getLogger(__name__)

# rows per fitness task; fixed so chunking never depends on the worker count
FITNESS_CHUNK = 64


class GaService:
    """
    Genetic search over RIS phase vectors maximizing the closed-form sum
    rate. Generation g draws all operator randomness from the substream
    (seed, GA_STREAM, g) in this order: mutation of the culled individuals
    (rank order), the SUS pointer offset, the parent shuffle, then the
    crossover cut points pair by pair. Generation 0 is the initial draw.
    """

    @staticmethod
    def evaluate(chromosomes: np.ndarray, scenario: Scenario) -> np.ndarray:
        """Sum-rate fitness of every row"""
        chromosomes = np.atleast_2d(chromosomes)
        chunks = [chromosomes[start:start + FITNESS_CHUNK] for start in range(0, chromosomes.shape[0], FITNESS_CHUNK)]
        scored = ordered_map(lambda chunk: ClosedFormService.sum_rate_batch(chunk, scenario), chunks)
        return np.concatenate(scored)

    @staticmethod
    def init_population(scenario: Scenario, config: GaConfig, seed: int) -> GaState:
        rng = substream(seed, GA_STREAM, 0)
        chromosomes = rng.uniform(0.0, TWO_PI, size=(config.population, scenario.N))
        return GaState(chromosomes=chromosomes, fitness=GaService.evaluate(chromosomes, scenario), generation=0)

    @staticmethod
    def sus_select(fitness: Sequence[float], count: int, rng: np.random.Generator) -> np.ndarray:
        """
        Stochastic universal sampling: `count` equally spaced pointers with one
        random offset over the cumulative-fitness wheel. Returns indices into
        `fitness`, in wheel order.
        """
        fitness = np.asarray(fitness, dtype=float)
        if fitness.size == 0:
            raise ValueError("cannot select from an empty population")
        if np.any(fitness < 0):
            raise ValueError("SUS needs nonnegative fitness")
        total = float(np.sum(fitness))
        if total <= 0:
            logger.warning("All fitness values are zero; selecting uniformly")
            fitness = np.ones_like(fitness)
            total = float(fitness.size)

        spacing = total / count
        start = rng.uniform(0.0, spacing)
        pointers = start + spacing * np.arange(count)
        wheel = np.cumsum(fitness)
        picks = np.searchsorted(wheel, pointers, side="right")
        return np.minimum(picks, fitness.size - 1)

    @staticmethod
    def two_point_crossover(parent_a: np.ndarray, parent_b: np.ndarray, rng: np.random.Generator,
                            cuts: Optional[Tuple[int, int]] = None) -> np.ndarray:
        """
        One child a[:u] + b[u:v] + a[v:] with cut points 1 <= u < v <= N-1
        drawn uniformly. N = 2 uses (1, 2); N = 1 copies parent_a.
        """
        parent_a, parent_b = np.asarray(parent_a), np.asarray(parent_b)
        if parent_a.shape != parent_b.shape:
            raise ScenarioValidationError("parents must have equal chromosome lengths")
        N = parent_a.shape[0]
        if N == 1:
            return parent_a.copy()
        if cuts is None:
            if N == 2:
                cuts = (1, 2)
            else:
                u, v = np.sort(rng.choice(np.arange(1, N), size=2, replace=False))
                cuts = (int(u), int(v))
        u, v = cuts
        child = parent_a.copy()
        child[u:v] = parent_b[u:v]
        return child

    @staticmethod
    def uniform_mutation(chromosome: np.ndarray, prob: float, rng: np.random.Generator) -> np.ndarray:
        """Each gene is redrawn on [0, 2π) with probability `prob`"""
        if not 0.0 <= prob <= 1.0:
            raise ValueError(f"mutation probability must lie in [0, 1], got {prob}")
        chromosome = np.asarray(chromosome)
        mask = rng.random(chromosome.shape[0]) < prob
        fresh = rng.uniform(0.0, TWO_PI, size=chromosome.shape[0])
        return np.where(mask, fresh, chromosome)

    @staticmethod
    def rank(fitness: np.ndarray) -> np.ndarray:
        """Indices by descending fitness, ties broken by lower index"""
        return np.argsort(-np.asarray(fitness), kind="stable")

    @staticmethod
    def evolve_generation(state: GaState, scenario: Scenario, config: GaConfig,
                          rng: np.random.Generator) -> GaState:
        if state.size != config.population:
            raise ScenarioValidationError(
                f"population has {state.size} individuals, config expects {config.population}"
            )
        order = GaService.rank(state.fitness)
        elites = order[:config.elites]
        middle = order[config.elites:config.population - config.culled]
        culled = order[config.population - config.culled:]

        mutants = [GaService.uniform_mutation(state.chromosomes[t], config.mutation_prob, rng) for t in culled]

        children = []
        if config.crossover_offspring:
            picks = GaService.sus_select(state.fitness[middle], config.parents, rng)
            parents = middle[picks][rng.permutation(config.parents)]
            for a, b in zip(parents[0::2], parents[1::2]):
                children.append(GaService.two_point_crossover(state.chromosomes[a], state.chromosomes[b], rng))

        offspring = np.array(mutants + children).reshape(-1, scenario.N)
        chromosomes = np.concatenate([state.chromosomes[elites], offspring])
        fitness = np.concatenate([
            state.fitness[elites],
            GaService.evaluate(offspring, scenario) if offspring.shape[0] else np.empty(0),
        ])
        return GaState(chromosomes=chromosomes, fitness=fitness, generation=state.generation + 1)

    @staticmethod
    def run(scenario: Scenario, config: GaConfig, seed: int) -> Tuple[PhaseShifts, GaTrace]:
        """
        Evolve for config.generations_for(N) generations, or until the best
        fitness has not improved for `stagnation_window` generations.
        """
        generations = config.generations_for(scenario.N)
        state = GaService.init_population(scenario, config, seed)
        trace = GaTrace()
        snapshot = config.snapshot_every
        trace.record(state, snapshot=bool(snapshot))

        best, stale = float(np.max(state.fitness)), 0
        milestone = max(1, generations // 10)
        logger.info(f"GA start: N={scenario.N}, K={scenario.K}, {generations} generations, best={best:.6g}")

        for g in range(1, generations + 1):
            rng = substream(seed, GA_STREAM, g)
            state = GaService.evolve_generation(state, scenario, config, rng)
            trace.record(state, snapshot=bool(snapshot) and g % snapshot == 0)

            current = trace.best_fitness[-1]
            if current > best:
                best, stale = current, 0
            else:
                stale += 1
            if g % milestone == 0:
                logger.info(f"GA generation {g}/{generations}: best={current:.6g}, mean={trace.mean_fitness[-1]:.6g}")
            if config.stagnation_window and stale >= config.stagnation_window:
                logger.info(f"GA stopped at generation {g}: no improvement for {stale} generations")
                break

        winner = PhaseShifts(state.chromosomes[state.best_index])
        logger.info(f"GA finished: best sum rate {float(state.fitness[state.best_index]):.6g} bits/s/Hz")
        return winner, trace
