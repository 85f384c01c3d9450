import dataclasses
import json
import logging
import math
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ris_kit.models.scenario import (
    AngleSet,
    Dimensions,
    FadingParams,
    GeometryMeta,
    LinkBudget,
    Scenario,
)
from ris_kit.schemas.scenario import ScenarioConfig, is_perfect_square
from ris_kit.utils.error_handlers import (
    ConfigError,
    ScenarioValidationError,
    config_error_from_pydantic,
)
from ris_kit.utils.rng import ANGLE_STREAM, substream

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class ScenarioService:
    """
    Builds frozen Scenario values from configs: unit conversion, path-loss
    geometry, validation and the seeded angle draw.
    """

    @staticmethod
    def dbm_to_watt(value: float) -> float:
        """10^((dBm - 30) / 10)"""
        if not math.isfinite(value):
            raise ScenarioValidationError(f"power must be finite, got {value}")
        return 10.0 ** ((value - 30.0) / 10.0)

    @staticmethod
    def watt_to_dbm(value: float) -> float:
        if not (math.isfinite(value) and value > 0):
            raise ScenarioValidationError(f"power must be finite and > 0 W, got {value}")
        return 10.0 * math.log10(value) + 30.0

    @staticmethod
    def user_bs_distance(k: int, d_ui: float, d_ib: float, num_users: int) -> float:
        """
        Distance from user k (1-based) to the BS for users placed at angle
        πk/5 on a circle of radius d_ui around the RIS.
        """
        if not 1 <= k <= num_users:
            raise IndexError(f"user index {k} outside 1..{num_users}")
        angle = math.pi / 5.0 * k
        return math.sqrt((d_ib - d_ui * math.sin(angle)) ** 2 + (d_ui * math.cos(angle)) ** 2)

    @staticmethod
    def path_loss_set(d_ui: float, d_ib: float, K: int) -> Tuple[Tuple[float, ...], float, Tuple[float, ...]]:
        """
        Distance-based path losses: α_k = 1e-3·d_UI^-2, β = 1e-3·d_IB^-2.5,
        γ_k = 1e-3·(d_k^UB)^-4.
        """
        if not (d_ui > 0 and d_ib > 0):
            raise ScenarioValidationError(f"distances must be > 0, got d_ui={d_ui}, d_ib={d_ib}")
        alpha = tuple(1e-3 * d_ui ** -2.0 for _ in range(K))
        beta = 1e-3 * d_ib ** -2.5
        gamma = []
        for k in range(1, K + 1):
            d_ub = ScenarioService.user_bs_distance(k, d_ui, d_ib, K)
            if d_ub <= 0:
                raise ScenarioValidationError(f"user {k} coincides with the BS")
            gamma.append(1e-3 * d_ub ** -4.0)
        return alpha, beta, tuple(gamma)

    @staticmethod
    def draw_angles(seed: int, K: int) -> AngleSet:
        """
        Uniform draws on [0, 2π) from the angle substream of `seed`, consumed
        in the order φ_r^a, φ_r^e, φ_t^a, φ_t^e, φ_kr^a[0..K), φ_kr^e[0..K).
        """
        rng = substream(seed, ANGLE_STREAM)
        draws = rng.uniform(0.0, TWO_PI, size=4 + 2 * K)
        return AngleSet(
            phi_r_a=float(draws[0]),
            phi_r_e=float(draws[1]),
            phi_t_a=float(draws[2]),
            phi_t_e=float(draws[3]),
            phi_kr_a=tuple(float(v) for v in draws[4:4 + K]),
            phi_kr_e=tuple(float(v) for v in draws[4 + K:4 + 2 * K]),
        )

    @staticmethod
    def _wrap(value: float) -> float:
        wrapped = math.fmod(value, TWO_PI)
        if wrapped < 0:
            wrapped += TWO_PI
        return 0.0 if wrapped >= TWO_PI else wrapped

    @staticmethod
    def build_scenario(config: ScenarioConfig, seed: Optional[int] = None) -> Scenario:
        """
        Freeze a validated config into a Scenario. `seed` overrides config.seed
        and only affects the drawn angles.
        """
        seed = config.seed if seed is None else seed
        M, N, K = config.M, config.N, config.K
        if not (is_perfect_square(M) and is_perfect_square(N)):
            raise ScenarioValidationError(f"M={M} and N={N} must be perfect squares")

        geometry = None
        if config.uses_geometry:
            if config.alpha is not None or config.beta is not None or config.gamma is not None:
                logger.warning("Both geometry and explicit path losses given; using geometry")
            alpha, beta, gamma = ScenarioService.path_loss_set(config.d_ui, config.d_ib, K)
            user_angles = tuple(math.pi / 5.0 * k for k in range(1, K + 1))
            d_ub = tuple(
                ScenarioService.user_bs_distance(k, config.d_ui, config.d_ib, K) for k in range(1, K + 1)
            )
            geometry = GeometryMeta(d_ui=config.d_ui, d_ib=config.d_ib, user_angles=user_angles, d_ub=d_ub)
        else:
            alpha, beta, gamma = tuple(config.alpha), float(config.beta), tuple(config.gamma)

        if config.p_watt is not None:
            p = tuple(float(v) for v in config.p_watt)
        else:
            p = tuple(ScenarioService.dbm_to_watt(v) for v in config.p_dbm)
        if any(v < 0 for v in p):
            raise ScenarioValidationError("transmit powers must be >= 0")
        if config.sigma2_watt is not None:
            sigma2 = float(config.sigma2_watt)
        else:
            sigma2 = ScenarioService.dbm_to_watt(config.sigma2_dbm)

        if config.angles is not None:
            a = config.angles
            wrap = ScenarioService._wrap
            angles = AngleSet(
                phi_r_a=wrap(a.phi_r_a),
                phi_r_e=wrap(a.phi_r_e),
                phi_t_a=wrap(a.phi_t_a),
                phi_t_e=wrap(a.phi_t_e),
                phi_kr_a=tuple(wrap(v) for v in a.phi_kr_a),
                phi_kr_e=tuple(wrap(v) for v in a.phi_kr_e),
            )
        else:
            angles = ScenarioService.draw_angles(seed, K)

        scenario = Scenario(
            dims=Dimensions(M=M, N=N, K=K),
            fading=FadingParams(
                delta=float(config.delta),
                epsilon=tuple(float(v) for v in config.epsilon),
                alpha=tuple(float(v) for v in alpha),
                beta=float(beta),
                gamma=tuple(float(v) for v in gamma),
            ),
            angles=angles,
            budget=LinkBudget(p=p, sigma2=sigma2, spacing_ratio=float(config.spacing_ratio)),
            geometry_meta=geometry,
            seed=seed,
        )
        logger.debug(f"Built scenario M={M} N={N} K={K} seed={seed}")
        return scenario

    @staticmethod
    def parse_config(data: Dict[str, Any], source: str = "scenario config") -> ScenarioConfig:
        try:
            return ScenarioConfig.model_validate(data)
        except ValidationError as e:
            raise config_error_from_pydantic(e, source) from e

    @staticmethod
    def load_config(path: str) -> ScenarioConfig:
        """Read and validate a JSON scenario config"""
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"Config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
        return ScenarioService.parse_config(data, source=f"config {path}")

    @staticmethod
    def default_config(seed: int = 0) -> ScenarioConfig:
        return ScenarioConfig(
            M=49, N=49, K=4,
            delta=1.0,
            epsilon=10.0,
            p_dbm=30.0,
            sigma2_dbm=-104.0,
            d_ui=20.0,
            d_ib=1000.0,
            spacing_ratio=0.5,
            seed=seed,
        )

    @staticmethod
    def check(scenario: Scenario) -> Scenario:
        """
        Structural invariants of a Scenario built outside build_scenario:
        square M and N, K-long per-user tuples, finite nonnegative losses and
        powers. A zero noise power is allowed; the rate formulas raise
        DomainError where it leaves a user's SINR undefined.
        """
        M, N, K = scenario.M, scenario.N, scenario.K
        if K < 1:
            raise ScenarioValidationError(f"need at least one user, got K={K}")
        if not (is_perfect_square(M) and is_perfect_square(N)):
            raise ScenarioValidationError(f"M={M} and N={N} must be perfect squares")
        fading, budget = scenario.fading, scenario.budget
        per_user = {"epsilon": fading.epsilon, "alpha": fading.alpha, "gamma": fading.gamma, "p": budget.p}
        for name, values in per_user.items():
            if len(values) != K:
                raise ScenarioValidationError(f"{name} has {len(values)} entries, expected K={K}")
        for name, values in dict(per_user, delta=(fading.delta,), beta=(fading.beta,),
                                 sigma2=(budget.sigma2,)).items():
            array = np.asarray(values, dtype=float)
            if not np.all(np.isfinite(array)) or np.any(array < 0):
                raise ScenarioValidationError(f"{name} must be finite and nonnegative, got {values}")
        if not budget.spacing_ratio > 0:
            raise ScenarioValidationError(f"spacing_ratio must be positive, got {budget.spacing_ratio}")
        return scenario

    @staticmethod
    def serialize(scenario: Scenario) -> Dict[str, Any]:
        return dataclasses.asdict(scenario)

    @staticmethod
    def deserialize(data: Dict[str, Any]) -> Scenario:
        """Inverse of serialize"""
        def tupled(record: Dict[str, Any]) -> Dict[str, Any]:
            return {key: tuple(value) if isinstance(value, list) else value for key, value in record.items()}

        try:
            geometry = data.get("geometry_meta")
            scenario = Scenario(
                dims=Dimensions(**data["dims"]),
                fading=FadingParams(**tupled(data["fading"])),
                angles=AngleSet(**tupled(data["angles"])),
                budget=LinkBudget(**tupled(data["budget"])),
                geometry_meta=GeometryMeta(**tupled(geometry)) if geometry else None,
                seed=data.get("seed"),
            )
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Malformed serialized scenario: {e}") from e
        return ScenarioService.check(scenario)

    @staticmethod
    def with_overrides(scenario: Scenario, **fields) -> Scenario:
        """
        Copy of `scenario` with fading or budget fields replaced, e.g.
        with_overrides(s, delta=0.0, epsilon=(0.0, 0.0)). Scalars given for
        per-user fields are broadcast to all K users.
        """
        K = scenario.K
        per_user = {"epsilon", "alpha", "gamma", "p"}
        fading_fields = {f.name for f in dataclasses.fields(FadingParams)}
        budget_fields = {f.name for f in dataclasses.fields(LinkBudget)}
        fading_updates, budget_updates = {}, {}
        for name, value in fields.items():
            if name in per_user:
                value = tuple(float(v) for v in np.broadcast_to(np.asarray(value, dtype=float), (K,)))
            else:
                value = float(value)
            if name in fading_fields:
                fading_updates[name] = value
            elif name in budget_fields:
                budget_updates[name] = value
            else:
                raise ScenarioValidationError(f"cannot override scenario field {name!r}")
        return ScenarioService.check(dataclasses.replace(
            scenario,
            fading=dataclasses.replace(scenario.fading, **fading_updates),
            budget=dataclasses.replace(scenario.budget, **budget_updates),
        ))

    @staticmethod
    def composite_path_loss(scenario: Scenario) -> np.ndarray:
        """c_k = β α_k / ((δ + 1)(ε_k + 1))"""
        fading = scenario.fading
        return fading.beta * fading.alpha_array / ((fading.delta + 1.0) * (fading.epsilon_array + 1.0))
