from dataclasses import dataclass
import numpy as np

TWO_PI = 2.0 * np.pi


def _frozen(array) -> np.ndarray:
    array = np.array(array)
    array.setflags(write=False)
    return array


def normalize_phase(theta) -> np.ndarray:
    """Map angles onto [0, 2π)."""
    wrapped = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # mod of a tiny negative value rounds up to exactly 2π
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


@dataclass(frozen=True, eq=False)
class PhaseShifts:
    """RIS configuration θ ∈ [0, 2π)^N, i.e. Φ = diag(e^{jθ})."""
    theta: np.ndarray

    def __post_init__(self):
        theta = np.atleast_1d(normalize_phase(self.theta))
        if theta.ndim != 1:
            raise ValueError("phase vector must be one-dimensional")
        object.__setattr__(self, "theta", _frozen(theta))

    @property
    def N(self) -> int:
        return int(self.theta.shape[0])

    @property
    def phasors(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhaseShifts):
            return NotImplemented
        return np.array_equal(self.theta, other.theta)

    def __hash__(self) -> int:
        return hash(self.theta.tobytes())


@dataclass(frozen=True, eq=False)
class LosComponents:
    h_bar: np.ndarray   # (K, N), row k is a_N(φ_kr)
    H2_bar: np.ndarray  # (M, N), a_M(φ_r) a_N(φ_t)^H
    a_M: np.ndarray     # (M,)
    a_N_t: np.ndarray   # (N,)

    def __post_init__(self):
        for name in ("h_bar", "H2_bar", "a_M", "a_N_t"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    One fading draw. With a leading batch axis the same container holds a
    stack of independent draws: H2 (B, M, N), h (B, K, N), d (B, K, M).
    """
    H2: np.ndarray  # (M, N)
    h: np.ndarray   # (K, N), row k is h_k
    d: np.ndarray   # (K, M), row k is d_k

    @property
    def batched(self) -> bool:
        return self.H2.ndim == 3
