import csv
import logging
from typing import Union

import numpy as np

from ris_kit.models.channel import ChannelRealization, LosComponents, PhaseShifts, TWO_PI
from ris_kit.models.scenario import Scenario
from ris_kit.schemas.scenario import is_perfect_square
from ris_kit.utils.csv_io import write_csv
from ris_kit.utils.error_handlers import ConfigError, ScenarioValidationError
from ris_kit.utils.rng import complex_normal

logger = logging.getLogger(__name__)


class ChannelService:
    """
    Rician user-RIS and RIS-BS links, Rayleigh direct links, and the
    cascaded channel g_k = H2 Φ h_k.
    """

    @staticmethod
    def steering_vector(X: int, theta_a: float, theta_e: float, spacing_ratio: float) -> np.ndarray:
        """
        USPA response a_X(ϑ^a, ϑ^e). Element n (0-based) sits at grid position
        x = n // √X, y = n mod √X and has phase
        2π (d/λ) (x sinϑ^e sinϑ^a + y cosϑ^e).
        """
        if not is_perfect_square(X):
            raise ScenarioValidationError(f"array size {X} is not a perfect square")
        side = int(round(np.sqrt(X)))
        n = np.arange(X)
        x, y = n // side, n % side
        phase = TWO_PI * spacing_ratio * (x * np.sin(theta_e) * np.sin(theta_a) + y * np.cos(theta_e))
        return np.exp(1j * phase)

    @staticmethod
    def los_components(scenario: Scenario) -> LosComponents:
        angles, d = scenario.angles, scenario.budget.spacing_ratio
        h_bar = np.stack([
            ChannelService.steering_vector(scenario.N, a, e, d)
            for a, e in zip(angles.phi_kr_a, angles.phi_kr_e)
        ])
        a_M = ChannelService.steering_vector(scenario.M, angles.phi_r_a, angles.phi_r_e, d)
        a_N_t = ChannelService.steering_vector(scenario.N, angles.phi_t_a, angles.phi_t_e, d)
        return LosComponents(h_bar=h_bar, H2_bar=np.outer(a_M, a_N_t.conj()), a_M=a_M, a_N_t=a_N_t)

    @staticmethod
    def sample_batch(scenario: Scenario, rng: np.random.Generator, size: int,
                     los: LosComponents = None) -> ChannelRealization:
        """
        `size` independent realizations stacked on a leading axis. Draw order:
        H̃2, then h̃, then d̃.
        """
        M, N, K = scenario.M, scenario.N, scenario.K
        fading = scenario.fading
        los = los or ChannelService.los_components(scenario)

        H2_tilde = complex_normal(rng, (size, M, N))
        h_tilde = complex_normal(rng, (size, K, N))
        d_tilde = complex_normal(rng, (size, K, M))

        delta = fading.delta
        H2 = np.sqrt(fading.beta) * (
            np.sqrt(delta / (delta + 1.0)) * los.H2_bar + np.sqrt(1.0 / (delta + 1.0)) * H2_tilde
        )

        eps = fading.epsilon_array[:, None]
        h = np.sqrt(fading.alpha_array)[:, None] * (
            np.sqrt(eps / (eps + 1.0)) * los.h_bar + np.sqrt(1.0 / (eps + 1.0)) * h_tilde
        )
        d = np.sqrt(fading.gamma_array)[:, None] * d_tilde
        return ChannelRealization(H2=H2, h=h, d=d)

    @staticmethod
    def sample_realization(scenario: Scenario, rng: np.random.Generator) -> ChannelRealization:
        batch = ChannelService.sample_batch(scenario, rng, 1)
        return ChannelRealization(H2=batch.H2[0], h=batch.h[0], d=batch.d[0])

    @staticmethod
    def cascaded(realization: ChannelRealization, phases: PhaseShifts) -> np.ndarray:
        """
        Row k of the result is g_k = H2 diag(e^{jθ}) h_k; works on single or
        batched realizations.
        """
        H2, h = realization.H2, realization.h
        if H2.shape[-1] != phases.N or h.shape[-1] != phases.N:
            raise ScenarioValidationError(
                f"phase vector has {phases.N} entries but the channel has {H2.shape[-1]} RIS elements"
            )
        return np.einsum("...mn,...kn->...km", H2, h * phases.phasors)

    @staticmethod
    def zero_phases(N: int) -> PhaseShifts:
        return PhaseShifts(np.zeros(N))

    @staticmethod
    def random_phases(N: int, rng: np.random.Generator) -> PhaseShifts:
        return PhaseShifts(rng.uniform(0.0, TWO_PI, size=N))

    @staticmethod
    def save_phases(path: str, phases: PhaseShifts) -> None:
        write_csv(path, ("theta",), ([float(value)] for value in phases.theta))
        logger.info(f"Wrote {phases.theta.shape[0]} phase shifts to {path}")

    @staticmethod
    def load_phases(path: str, N: Union[int, None] = None) -> PhaseShifts:
        """Read a one-column θ file as written by save_phases"""
        try:
            with open(path, "r", encoding="utf-8", newline="") as f:
                rows = list(csv.reader(f))
        except FileNotFoundError as e:
            raise ConfigError(f"Phase file not found: {path}") from e
        if rows and rows[0] and rows[0][0].strip() == "theta":
            rows = rows[1:]
        try:
            theta = np.array([float(row[0]) for row in rows if row])
        except ValueError as e:
            raise ConfigError(f"Phase file {path} holds a non-numeric entry: {e}") from e
        if N is not None and theta.shape[0] != N:
            raise ScenarioValidationError(f"phase file {path} has {theta.shape[0]} entries, expected N={N}")
        return PhaseShifts(theta)
