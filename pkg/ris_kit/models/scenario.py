from dataclasses import dataclass, field
from typing import Optional, Tuple
import numpy as np


@dataclass(frozen=True)
class Dimensions:
    M: int  # BS antennas
    N: int  # RIS elements
    K: int  # users

    @property
    def sqrt_N(self) -> int:
        return int(round(np.sqrt(self.N)))


@dataclass(frozen=True)
class FadingParams:
    delta: float
    epsilon: Tuple[float, ...]
    alpha: Tuple[float, ...]
    beta: float
    gamma: Tuple[float, ...]

    @property
    def epsilon_array(self) -> np.ndarray:
        return np.asarray(self.epsilon, dtype=float)

    @property
    def alpha_array(self) -> np.ndarray:
        return np.asarray(self.alpha, dtype=float)

    @property
    def gamma_array(self) -> np.ndarray:
        return np.asarray(self.gamma, dtype=float)


@dataclass(frozen=True)
class AngleSet:
    phi_r_a: float   # AoA azimuth at the BS
    phi_r_e: float   # AoA elevation at the BS
    phi_t_a: float   # AoD azimuth from the RIS
    phi_t_e: float   # AoD elevation from the RIS
    phi_kr_a: Tuple[float, ...]
    phi_kr_e: Tuple[float, ...]


@dataclass(frozen=True)
class LinkBudget:
    p: Tuple[float, ...]  # watts
    sigma2: float         # watts
    spacing_ratio: float = 0.5

    @property
    def p_array(self) -> np.ndarray:
        return np.asarray(self.p, dtype=float)


@dataclass(frozen=True)
class GeometryMeta:
    d_ui: float
    d_ib: float
    user_angles: Tuple[float, ...]
    d_ub: Tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    """
    Complete statistical description of one RIS-aided uplink.
    Every field is an immutable scalar or tuple, so equality and hashing are
    exact and a Scenario can be shared freely between threads.
    """
    dims: Dimensions
    fading: FadingParams
    angles: AngleSet
    budget: LinkBudget
    geometry_meta: Optional[GeometryMeta] = field(default=None)
    seed: Optional[int] = field(default=None)

    @property
    def M(self) -> int:
        return self.dims.M

    @property
    def N(self) -> int:
        return self.dims.N

    @property
    def K(self) -> int:
        return self.dims.K
