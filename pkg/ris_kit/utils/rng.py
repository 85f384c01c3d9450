"""
Seeded random streams.

Every random draw in the toolkit comes from a counter-based Philox generator
keyed by (master seed, namespace, index...). Substreams with distinct keys are
independent, so work split across blocks or workers is reproducible no matter
in which order the blocks run.
"""
from typing import Tuple
import numpy as np

ANGLE_STREAM = 0
CHANNEL_STREAM = 1
GA_STREAM = 2
PHASE_STREAM = 3
SWEEP_STREAM = 4

MAX_SEED = 2**64 - 1


def _key(seed: int, key: Tuple[int, ...]) -> np.random.SeedSequence:
    if seed < 0 or seed > MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(part) for part in key))


def substream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the substream (seed, *key)."""
    return np.random.Generator(np.random.Philox(_key(seed, key)))


def derive_seed(seed: int, *key: int) -> int:
    """Child master seed, e.g. one per sweep point."""
    return int(_key(seed, key).generate_state(1, dtype=np.uint64)[0])


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """
    Circularly-symmetric CN(0, 1) entries: real and imaginary parts
    are i.i.d. N(0, 1/2).
    """
    draws = rng.standard_normal(tuple(shape) + (2,))
    return (draws[..., 0] + 1j * draws[..., 1]) * np.sqrt(0.5)
