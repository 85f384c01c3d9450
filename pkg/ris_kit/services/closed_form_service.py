import logging
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from ris_kit.models.channel import PhaseShifts
from ris_kit.models.rate import ArrayGains, RateBreakdown, SymmetricPair
from ris_kit.models.scenario import Scenario
from ris_kit.services.channel_service import ChannelService
from ris_kit.services.scenario_service import ScenarioService
from ris_kit.utils.error_handlers import DomainError, ScenarioValidationError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


def _user(k: int, K: int) -> int:
    """1-based user index to array position"""
    if not 1 <= k <= K:
        raise IndexError(f"user index {k} outside 1..{K}")
    return k - 1


def _accumulate(*addends) -> np.ndarray:
    # addends span ~30 orders of magnitude at realistic path losses
    stacked = np.stack(np.broadcast_arrays(*addends), axis=-1).astype(np.longdouble)
    return np.sum(stacked, axis=-1).astype(float)


@lru_cache(maxsize=64)
def _statics(scenario: Scenario):
    """Phase-independent quantities: c_k, ζ_n^k and the LoS Gram matrix h̄_k^H h̄_i"""
    angles = scenario.angles
    N = scenario.N
    side = scenario.dims.sqrt_N
    n = np.arange(N)
    x, y = n // side, n % side
    kr_a, kr_e = np.asarray(angles.phi_kr_a), np.asarray(angles.phi_kr_e)
    horizontal = np.sin(kr_e) * np.sin(kr_a) - np.sin(angles.phi_t_e) * np.sin(angles.phi_t_a)
    vertical = np.cos(kr_e) - np.cos(angles.phi_t_e)
    zeta = TWO_PI * scenario.budget.spacing_ratio * (
        x[None, :] * horizontal[:, None] + y[None, :] * vertical[:, None]
    )
    zeta.setflags(write=False)

    h_bar = ChannelService.los_components(scenario).h_bar
    gram = h_bar.conj() @ h_bar.T  # gram[k, i] = h̄_k^H h̄_i
    gram.setflags(write=False)

    c = ScenarioService.composite_path_loss(scenario)
    c.setflags(write=False)
    logger.debug(f"Closed-form statics built for M={scenario.M}, N={N}, K={scenario.K}")
    return c, zeta, gram


class ClosedFormService:
    """
    Statistical-CSI ergodic rate: the signal, interference and noise
    expectations in closed form, their rate, and the special-case reductions.
    User indices are 1-based.
    """

    @staticmethod
    def zeta(n: int, k: int, scenario: Scenario) -> float:
        if not 1 <= n <= scenario.N:
            raise IndexError(f"element index {n} outside 1..{scenario.N}")
        _, zeta, _ = _statics(scenario)
        return float(zeta[_user(k, scenario.K), n - 1])

    @staticmethod
    def zeta_matrix(scenario: Scenario) -> np.ndarray:
        """(K, N) array of ζ_n^k"""
        return _statics(scenario)[1]

    @staticmethod
    def _thetas(thetas, scenario: Scenario) -> np.ndarray:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        if thetas.shape[-1] != scenario.N:
            raise ScenarioValidationError(
                f"phase vector has {thetas.shape[-1]} entries, scenario has N={scenario.N}"
            )
        return thetas

    @staticmethod
    def f_batch(thetas, scenario: Scenario) -> np.ndarray:
        """(P, K) array of f_k(Φ) = Σ_n e^{j(ζ_n^k + θ_n)} for P phase vectors"""
        thetas = ClosedFormService._thetas(thetas, scenario)
        _, zeta, _ = _statics(scenario)
        return np.sum(np.exp(1j * (zeta[None, :, :] + thetas[:, None, :])), axis=-1)

    @staticmethod
    def f_of_phi(phases: PhaseShifts, k: int, scenario: Scenario) -> complex:
        idx = _user(k, scenario.K)
        return complex(ClosedFormService.f_batch(phases.theta, scenario)[0, idx])

    @staticmethod
    def array_gains(phases: PhaseShifts, scenario: Scenario) -> ArrayGains:
        c, zeta, _ = _statics(scenario)
        return ArrayGains(zeta=zeta, f=ClosedFormService.f_batch(phases.theta, scenario)[0], c=c)

    @staticmethod
    def aligned_phases(k: int, scenario: Scenario) -> PhaseShifts:
        """θ_n = -ζ_n^k, which puts every phasor of f_k on the real axis (|f_k| = N)"""
        return PhaseShifts(-ClosedFormService.zeta_matrix(scenario)[_user(k, scenario.K)])

    @staticmethod
    def terms_batch(thetas, scenario: Scenario) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Signal (P, K), interference (P, K, K) and noise (P, K) expectations for
        P phase vectors, each addend kept in its printed grouping.
        """
        M, N = float(scenario.M), float(scenario.N)
        c, _, gram = _statics(scenario)
        fading = scenario.fading
        d = fading.delta
        eps = fading.epsilon_array
        gam = fading.gamma_array

        f = ClosedFormService.f_batch(thetas, scenario)
        F2 = np.abs(f) ** 2

        signal = _accumulate(
            M ** 2 * c ** 2 * d ** 2 * eps ** 2 * F2 ** 2,
            2 * c * M * d * eps * F2 * (
                c * (2 * M * N * d + M * N * eps + M * N + 2 * M + N * eps + N + 2) + gam * (M + 1)
            ),
            c ** 2 * M ** 2 * N ** 2 * (2 * d ** 2 + eps ** 2 + 2 * d * eps + 2 * d + 2 * eps + 1),
            c ** 2 * M * N ** 2 * (eps ** 2 + 2 * d * eps + 2 * d + 2 * eps + 1),
            c * M * N * (M + 1) * (c * (2 * d + 2 * eps + 1) + 2 * gam * (d + eps + 1)),
            gam ** 2 * (M ** 2 + M),
        )

        # axis -2 is k, axis -1 is i
        ck, ci = c[:, None], c[None, :]
        ek, ei = eps[:, None], eps[None, :]
        gk, gi = gam[:, None], gam[None, :]
        F2k, F2i = F2[:, :, None], F2[:, None, :]
        fk, fi = f[:, :, None], f[:, None, :]
        cross = np.real(np.conj(fk) * fi * gram.T[None, :, :])  # gram.T[k, i] = h̄_i^H h̄_k

        interference = _accumulate(
            M ** 2 * ck * ci * d ** 2 * ek * ei * F2k * F2i,
            M * ck * d * ek * F2k * (ci * (d * M * N + N * ei + N + 2 * M) + gi),
            M * ci * d * ei * F2i * (ck * (d * M * N + N * ek + N + 2 * M) + gk),
            M * N ** 2 * ck * ci * (M * d ** 2 + d * (ei + ek + 2) + (ek + 1) * (ei + 1)),
            M ** 2 * N * ck * ci * (2 * d + ei + ek + 1),
            M ** 2 * ck * ci * ek * ei * np.abs(gram) ** 2,
            2 * M ** 2 * ck * ci * d * ek * ei * cross,
            M * (ci * gk * N * (d + ei + 1) + ck * gi * N * (d + ek + 1) + gi * gk),
        )
        K = scenario.K
        interference = np.where(np.eye(K, dtype=bool)[None, :, :], 0.0, interference)

        noise = M * (c * d * eps * F2 + c * (d + eps + 1) * N + gam)
        return signal, interference, noise

    @staticmethod
    def sinr_parts_batch(thetas, scenario: Scenario) -> Tuple[np.ndarray, np.ndarray]:
        """(numerator, denominator) of every user's SINR, kept apart until the end"""
        signal, interference, noise = ClosedFormService.terms_batch(thetas, scenario)
        p = scenario.budget.p_array
        numerator = p * signal
        weighted = interference * p[None, None, :]
        denominator = _accumulate(*np.moveaxis(weighted, -1, 0), scenario.budget.sigma2 * noise)
        return numerator, denominator

    @staticmethod
    def _ratio(numerator: np.ndarray, denominator: np.ndarray) -> np.ndarray:
        """Elementwise SINR; a user with zero signal over a zero denominator gets 0"""
        numerator, denominator = np.asarray(numerator), np.asarray(denominator)
        live = denominator > 0
        if np.any(~live & (numerator > 0)):
            raise DomainError("SINR denominator vanishes for a user with nonzero signal power")
        return np.where(live, numerator / np.where(live, denominator, 1.0), 0.0)

    @staticmethod
    def rates_batch(thetas, scenario: Scenario) -> np.ndarray:
        """(P, K) per-user rates in bits/s/Hz"""
        numerator, denominator = ClosedFormService.sinr_parts_batch(thetas, scenario)
        return np.log2(1.0 + ClosedFormService._ratio(numerator, denominator))

    @staticmethod
    def sum_rate_batch(thetas, scenario: Scenario) -> np.ndarray:
        """GA fitness: sum rate for each row of `thetas`"""
        return np.sum(ClosedFormService.rates_batch(thetas, scenario), axis=-1)

    @staticmethod
    def sum_rate(phases: PhaseShifts, scenario: Scenario) -> float:
        return float(ClosedFormService.sum_rate_batch(phases.theta, scenario)[0])

    @staticmethod
    def rate_breakdown(phases: PhaseShifts, scenario: Scenario) -> RateBreakdown:
        signal, interference, noise = ClosedFormService.terms_batch(phases.theta, scenario)
        numerator, denominator = ClosedFormService.sinr_parts_batch(phases.theta, scenario)
        sinr = ClosedFormService._ratio(numerator, denominator)[0]
        return RateBreakdown(
            signal=signal[0],
            interference=interference[0],
            noise=noise[0],
            sinr=sinr,
            rate=np.log2(1.0 + sinr),
        )

    @staticmethod
    def signal_term(k: int, phases: PhaseShifts, scenario: Scenario) -> float:
        idx = _user(k, scenario.K)
        return float(ClosedFormService.terms_batch(phases.theta, scenario)[0][0, idx])

    @staticmethod
    def interference_term(k: int, i: int, phases: PhaseShifts, scenario: Scenario) -> float:
        if k == i:
            raise ValueError("interference_term needs two distinct users")
        kk, ii = _user(k, scenario.K), _user(i, scenario.K)
        return float(ClosedFormService.terms_batch(phases.theta, scenario)[1][0, kk, ii])

    @staticmethod
    def noise_term(k: int, phases: PhaseShifts, scenario: Scenario) -> float:
        idx = _user(k, scenario.K)
        return float(ClosedFormService.terms_batch(phases.theta, scenario)[2][0, idx])

    @staticmethod
    def ergodic_rate(k: int, phases: PhaseShifts, scenario: Scenario) -> float:
        idx = _user(k, scenario.K)
        numerator, denominator = ClosedFormService.sinr_parts_batch(phases.theta, scenario)
        # user k's ratio only
        sinr = ClosedFormService._ratio(numerator[0, idx], denominator[0, idx])
        return float(np.log2(1.0 + sinr))

    @staticmethod
    def cascaded_moments(k: int, i: Optional[int], phases: PhaseShifts,
                         scenario: Scenario) -> Tuple[float, float, Optional[float]]:
        """
        E{‖g_k‖²}, E{‖g_k‖⁴}, E{|g_k^H g_i|²}: the closed forms with every
        direct link removed (γ = 0).
        """
        cascaded_only = ScenarioService.with_overrides(scenario, gamma=0.0)
        norm2 = ClosedFormService.noise_term(k, phases, cascaded_only)
        norm4 = ClosedFormService.signal_term(k, phases, cascaded_only)
        cross = None
        if i is not None:
            cross = ClosedFormService.interference_term(k, i, phases, cascaded_only)
        return norm2, norm4, cross

    @staticmethod
    def sinr_no_ris(k: int, scenario: Scenario) -> float:
        """p_k (M+1) γ_k / (Σ_{i≠k} p_i γ_i + σ²)"""
        idx = _user(k, scenario.K)
        p = scenario.budget.p_array
        gam = scenario.fading.gamma_array
        others = np.arange(scenario.K) != idx
        numerator = p[idx] * (scenario.M + 1) * gam[idx]
        denominator = float(np.sum(p[others] * gam[others])) + scenario.budget.sigma2
        return float(ClosedFormService._ratio(np.asarray(numerator), np.asarray(denominator)))

    @staticmethod
    def rate_no_ris(k: int, scenario: Scenario) -> float:
        return float(np.log2(1.0 + ClosedFormService.sinr_no_ris(k, scenario)))

    @staticmethod
    def sinr_nlos(k: int, scenario: Scenario) -> float:
        """
        Pure-NLoS cascaded channels. Evaluates the reduced formula with the
        scenario's own c_k; callers substitute δ = ε_k = 0 themselves.
        """
        idx = _user(k, scenario.K)
        M, N = float(scenario.M), float(scenario.N)
        c = ScenarioService.composite_path_loss(scenario)
        gam = scenario.fading.gamma_array
        p = scenario.budget.p_array
        ck, gk = c[idx], gam[idx]
        numerator = p[idx] * float(_accumulate(
            ck ** 2 * (M * N ** 2 + N ** 2 + M * N + N),
            2 * ck * gk * N * (M + 1),
            gk ** 2 * (M + 1),
        ))
        others = [i for i in range(scenario.K) if i != idx]
        addends = [
            p[i] * (ck * c[i] * (N ** 2 + M * N) + ck * gam[i] * N + c[i] * gk * N + gk * gam[i])
            for i in others
        ]
        denominator = float(_accumulate(*addends, scenario.budget.sigma2 * (ck * N + gk)))
        return float(ClosedFormService._ratio(np.asarray(numerator), np.asarray(denominator)))

    @staticmethod
    def symmetric_pair(scenario: Scenario) -> SymmetricPair:
        """Two-user symmetric record taken from user 1's parameters"""
        c = ScenarioService.composite_path_loss(scenario)
        return SymmetricPair(
            M=scenario.M,
            N=scenario.N,
            c=float(c[0]),
            gamma=float(scenario.fading.gamma[0]),
            p=float(scenario.budget.p[0]),
            sigma2=float(scenario.budget.sigma2),
            delta=float(scenario.fading.delta),
        )

    @staticmethod
    def nlos_crossover(pair: SymmetricPair) -> Tuple[float, float]:
        """
        Pure-NLoS RIS beats the RIS-free system when p/σ² is below the first
        value, or equivalently when N exceeds the second.
        """
        if pair.M <= 1:
            raise DomainError("crossover thresholds need M >= 2")
        if not (pair.c > 0 and pair.gamma > 0):
            raise DomainError("crossover thresholds need c > 0 and gamma > 0")
        snr_threshold = (pair.N + 1) / (pair.gamma * (pair.M - 1)) + 1.0 / (pair.c * (pair.M - 1))
        n_threshold = pair.gamma * (pair.snr * (pair.M - 1) - 1.0 / pair.c) - 1.0
        return snr_threshold, n_threshold

    @staticmethod
    def sinr_random_limit(k: int, scenario: Scenario) -> float:
        """Large-N SINR when the phases are redrawn at random in every block"""
        idx = _user(k, scenario.K)
        if scenario.K < 2:
            raise DomainError("the random-phase limit needs at least one interfering user")
        M = float(scenario.M)
        d = scenario.fading.delta
        alpha = scenario.fading.alpha_array
        p = scenario.budget.p_array
        numerator = p[idx] * alpha[idx] * (M * (2 * d ** 2 + 2 * d + 1) + 2 * d + 1)
        others = np.arange(scenario.K) != idx
        denominator = float(np.sum(p[others] * alpha[others])) * (M * d ** 2 + 2 * d + 1)
        return float(ClosedFormService._ratio(np.asarray(numerator), np.asarray(denominator)))

    @staticmethod
    def rate_random_limit(k: int, scenario: Scenario) -> float:
        return float(np.log2(1.0 + ClosedFormService.sinr_random_limit(k, scenario)))

    @staticmethod
    def random_crossover(pair: SymmetricPair) -> float:
        """Random phases beat the RIS-free system when γ p/σ² is below this value"""
        if pair.M <= 1 or pair.delta <= 0:
            raise DomainError("the random-phase crossover needs M >= 2 and delta > 0")
        M, d = float(pair.M), pair.delta
        return ((2 * d ** 2 + 2 * d + 1) * M + 2 * d + 1) / (d ** 2 * (M ** 2 - M))
