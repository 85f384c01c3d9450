from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import List, Optional, Union
import math


def is_perfect_square(value: int) -> bool:
    if value < 1:
        return False
    root = math.isqrt(value)
    return root * root == value


def _all_finite(values) -> bool:
    return all(math.isfinite(v) for v in values)


class AngleOverride(BaseModel):
    """Fixed AoA/AoD set, radians; replaces the seeded draw"""
    model_config = ConfigDict(extra="forbid")

    phi_r_a: float
    phi_r_e: float
    phi_t_a: float
    phi_t_e: float
    phi_kr_a: List[float]
    phi_kr_e: List[float]


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    M: int = Field(ge=1)
    N: int = Field(ge=1)
    K: int = Field(ge=1)
    delta: float = Field(ge=0)
    epsilon: Union[float, List[float]]
    p_dbm: Optional[Union[float, List[float]]] = None
    p_watt: Optional[Union[float, List[float]]] = None
    sigma2_dbm: Optional[float] = None
    sigma2_watt: Optional[float] = None
    d_ui: Optional[float] = None
    d_ib: Optional[float] = None
    spacing_ratio: float = Field(default=0.5, gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    alpha: Optional[Union[float, List[float]]] = None
    beta: Optional[float] = None
    gamma: Optional[Union[float, List[float]]] = None
    angles: Optional[AngleOverride] = None

    @field_validator("M", "N")
    @classmethod
    def must_be_perfect_square(cls, v):
        if not is_perfect_square(v):
            raise ValueError(f"{v} is not a perfect square (uniform square planar array)")
        return v

    @model_validator(mode="after")
    def check_consistency(self):
        K = self.K

        def per_user(name, value, lower, strict=False):
            if value is None:
                return None
            values = [float(value)] * K if isinstance(value, (int, float)) else [float(v) for v in value]
            if len(values) != K:
                raise ValueError(f"{name} must have K={K} entries, got {len(values)}")
            if not _all_finite(values):
                raise ValueError(f"{name} entries must be finite")
            bad = [v for v in values if (v <= lower if strict else v < lower)]
            if bad:
                relation = ">" if strict else ">="
                raise ValueError(f"{name} entries must be {relation} {lower}, got {bad[0]}")
            return values

        self.epsilon = per_user("epsilon", self.epsilon, 0.0)
        self.alpha = per_user("alpha", self.alpha, 0.0, strict=True)
        self.gamma = per_user("gamma", self.gamma, 0.0)
        self.p_watt = per_user("p_watt", self.p_watt, 0.0)
        if self.p_dbm is not None:
            values = [float(self.p_dbm)] * K if isinstance(self.p_dbm, (int, float)) else list(self.p_dbm)
            if len(values) != K:
                raise ValueError(f"p_dbm must have K={K} entries, got {len(values)}")
            if not _all_finite(values):
                raise ValueError("p_dbm entries must be finite")
            self.p_dbm = values

        if self.p_dbm is None and self.p_watt is None:
            raise ValueError("one of p_dbm or p_watt is required")
        if self.sigma2_dbm is None and self.sigma2_watt is None:
            raise ValueError("one of sigma2_dbm or sigma2_watt is required")
        if self.sigma2_dbm is not None and not math.isfinite(self.sigma2_dbm):
            raise ValueError("sigma2_dbm must be finite")
        if self.sigma2_watt is not None and not (math.isfinite(self.sigma2_watt) and self.sigma2_watt > 0):
            raise ValueError("sigma2_watt must be finite and > 0")

        has_geometry = self.d_ui is not None or self.d_ib is not None
        if has_geometry:
            if self.d_ui is None or self.d_ib is None:
                raise ValueError("geometric path losses need both d_ui and d_ib")
            if not (self.d_ui > 0 and self.d_ib > 0):
                raise ValueError("d_ui and d_ib must be > 0")
        elif self.alpha is None or self.beta is None or self.gamma is None:
            raise ValueError("either d_ui/d_ib or all of alpha, beta, gamma are required")
        if self.beta is not None and not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError("beta must be finite and > 0")

        if self.angles is not None:
            if len(self.angles.phi_kr_a) != K or len(self.angles.phi_kr_e) != K:
                raise ValueError(f"angles.phi_kr_a and angles.phi_kr_e must have K={K} entries")
        return self

    @property
    def uses_geometry(self) -> bool:
        return self.d_ui is not None and self.d_ib is not None
