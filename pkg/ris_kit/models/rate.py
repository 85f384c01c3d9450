from dataclasses import dataclass
import numpy as np


@dataclass(frozen=True, eq=False)
class ArrayGains:
    zeta: np.ndarray  # (K, N) phase offsets ζ_n^k
    f: np.ndarray     # (K,) complex f_k(Φ)
    c: np.ndarray     # (K,) composite path loss c_k


@dataclass(frozen=True, eq=False)
class RateBreakdown:
    """Closed-form per-user terms of the ergodic rate approximation"""
    signal: np.ndarray        # (K,)
    interference: np.ndarray  # (K, K), diagonal unused and zero
    noise: np.ndarray         # (K,)
    sinr: np.ndarray          # (K,)
    rate: np.ndarray          # (K,) bits/s/Hz

    @property
    def sum_rate(self) -> float:
        return float(np.sum(self.rate))

    @property
    def K(self) -> int:
        return int(self.rate.shape[0])


@dataclass(frozen=True)
class SymmetricPair:
    """Two co-located users sharing c, γ and p"""
    M: int
    N: int
    c: float
    gamma: float
    p: float
    sigma2: float
    delta: float = 0.0

    @property
    def snr(self) -> float:
        return self.p / self.sigma2
