import logging
import math
from typing import Callable, List, Optional, Tuple

import numpy as np

from ris_kit.config import get_trial_block
from ris_kit.models.channel import ChannelRealization, PhaseShifts, TWO_PI
from ris_kit.models.estimate import McEstimate, MomentReport, MomentRow
from ris_kit.models.scenario import Scenario
from ris_kit.services.channel_service import ChannelService
from ris_kit.services.closed_form_service import ClosedFormService, _user
from ris_kit.utils.error_handlers import ScenarioValidationError
from ris_kit.utils.parallel import ordered_map
from ris_kit.utils.rng import CHANNEL_STREAM, PHASE_STREAM, derive_seed, substream

logger = logging.getLogger(__name__)

# complex entries drawn per block, bounds the memory of one block
BLOCK_ENTRY_BUDGET = 2 ** 21

MIN_RATE_TRIALS = 100
MIN_MOMENT_TRIALS = 10_000


class _Summary:
    """Count, means and co-moment matrix of a set of per-trial statistics"""

    def __init__(self, samples: np.ndarray):
        self.n = samples.shape[0]
        self.mean = samples.mean(axis=0)
        centered = samples - self.mean
        self.comoment = centered.T @ centered

    def merge(self, other: "_Summary") -> "_Summary":
        # pairwise update for means and co-moments of two disjoint sample sets
        n = self.n + other.n
        delta = other.mean - self.mean
        merged = object.__new__(_Summary)
        merged.n = n
        merged.mean = self.mean + delta * (other.n / n)
        merged.comoment = self.comoment + other.comoment + np.outer(delta, delta) * (self.n * other.n / n)
        return merged

    def estimate(self, column: int) -> McEstimate:
        variance = self.comoment[column, column] / (self.n - 1) if self.n > 1 else 0.0
        return McEstimate(
            mean=float(self.mean[column]),
            std_error=float(math.sqrt(max(variance, 0.0) / self.n)),
            trials=int(self.n),
        )

    def covariance(self, a: int, b: int) -> float:
        return float(self.comoment[a, b] / (self.n - 1)) if self.n > 1 else 0.0


class MonteCarloService:
    """
    Sampled ground truth for the closed forms. Trials are split into blocks;
    block b draws from the substream (seed, CHANNEL_STREAM, b) and block
    summaries are merged in block order, so results are bit-identical for
    any worker count.
    """

    @staticmethod
    def block_size(scenario: Scenario) -> int:
        per_trial = scenario.M * scenario.N + scenario.K * (scenario.N + scenario.M)
        return max(64, min(get_trial_block(), BLOCK_ENTRY_BUDGET // per_trial))

    @staticmethod
    def _run_blocks(scenario: Scenario, trials: int, seed: int,
                    statistics: Callable[[ChannelRealization], np.ndarray]) -> _Summary:
        """Evaluate `statistics` (trials x S array) over all blocks and merge"""
        block = MonteCarloService.block_size(scenario)
        sizes = [min(block, trials - start) for start in range(0, trials, block)]
        los = ChannelService.los_components(scenario)

        def run(index_and_size: Tuple[int, int]) -> _Summary:
            index, size = index_and_size
            rng = substream(seed, CHANNEL_STREAM, index)
            batch = ChannelService.sample_batch(scenario, rng, size, los=los)
            return _Summary(statistics(batch))

        summaries = ordered_map(run, list(enumerate(sizes)))
        total = summaries[0]
        for summary in summaries[1:]:
            total = total.merge(summary)
        return total

    @staticmethod
    def _sinr_batch(z: np.ndarray, p: np.ndarray, sigma2: float) -> np.ndarray:
        """(B, K) instantaneous MRC SINR for combined channels z = g + d of shape (B, K, M)"""
        norm2 = np.sum(np.abs(z) ** 2, axis=-1)
        gram = np.einsum("bkm,bim->bki", z.conj(), z)
        leak = np.abs(gram) ** 2 * p[None, None, :]
        K = z.shape[1]
        leak = np.where(np.eye(K, dtype=bool)[None, :, :], 0.0, leak)
        numerator = p[None, :] * norm2 ** 2
        denominator = np.sum(leak, axis=-1) + sigma2 * norm2
        out = np.zeros_like(norm2)
        # all-zero combined channel counts as SINR 0
        np.divide(numerator, denominator, out=out, where=norm2 > 0)
        return out

    @staticmethod
    def instantaneous_sinr(realization: ChannelRealization, phases: PhaseShifts,
                           scenario: Scenario, k: int) -> float:
        idx = _user(k, scenario.K)
        z = ChannelService.cascaded(realization, phases) + realization.d
        sinr = MonteCarloService._sinr_batch(z[None, :, :], scenario.budget.p_array, scenario.budget.sigma2)
        return float(sinr[0, idx])

    @staticmethod
    def _check_trials(trials: int, minimum: int) -> None:
        if trials < minimum:
            raise ScenarioValidationError(f"need at least {minimum} trials, got {trials}")

    @staticmethod
    def _rate_samples(scenario: Scenario, phases: PhaseShifts, k: Optional[int]):
        idx = None if k is None else _user(k, scenario.K)
        p, sigma2 = scenario.budget.p_array, scenario.budget.sigma2

        def statistics(batch: ChannelRealization) -> np.ndarray:
            z = ChannelService.cascaded(batch, phases) + batch.d
            rates = np.log2(1.0 + MonteCarloService._sinr_batch(z, p, sigma2))
            column = rates.sum(axis=-1) if idx is None else rates[:, idx]
            return column[:, None]

        return statistics

    @staticmethod
    def ergodic_rate_mc(scenario: Scenario, phases: PhaseShifts, k: int,
                        trials: int, seed: int) -> McEstimate:
        """Sample mean of log2(1 + SINR_k) over independent fading draws"""
        MonteCarloService._check_trials(trials, MIN_RATE_TRIALS)
        statistics = MonteCarloService._rate_samples(scenario, phases, k)
        return MonteCarloService._run_blocks(scenario, trials, seed, statistics).estimate(0)

    @staticmethod
    def sum_rate_mc(scenario: Scenario, phases: PhaseShifts, trials: int, seed: int) -> McEstimate:
        MonteCarloService._check_trials(trials, MIN_RATE_TRIALS)
        statistics = MonteCarloService._rate_samples(scenario, phases, None)
        return MonteCarloService._run_blocks(scenario, trials, seed, statistics).estimate(0)

    @staticmethod
    def approx_rate_mc(scenario: Scenario, phases: PhaseShifts, k: int,
                       trials: int, seed: int) -> McEstimate:
        """
        log2(1 + p_k E{‖z_k‖⁴} / (Σ_{i≠k} p_i E{|z_k^H z_i|²} + σ² E{‖z_k‖²}))
        with every expectation replaced by its sample mean. The standard
        error follows from the delta method on the ratio of means.
        """
        MonteCarloService._check_trials(trials, MIN_RATE_TRIALS)
        idx = _user(k, scenario.K)
        p, sigma2 = scenario.budget.p_array, scenario.budget.sigma2
        others = np.arange(scenario.K) != idx

        def statistics(batch: ChannelRealization) -> np.ndarray:
            z = ChannelService.cascaded(batch, phases) + batch.d
            zk = z[:, idx, :]
            norm2 = np.sum(np.abs(zk) ** 2, axis=-1)
            leak = np.abs(np.einsum("bm,bim->bi", zk.conj(), z)) ** 2
            numerator = p[idx] * norm2 ** 2
            denominator = np.sum(leak[:, others] * p[others], axis=-1) + sigma2 * norm2
            return np.stack([numerator, denominator], axis=-1)

        summary = MonteCarloService._run_blocks(scenario, trials, seed, statistics)
        mu, mv = float(summary.mean[0]), float(summary.mean[1])
        if mv <= 0:
            return McEstimate(mean=0.0, std_error=0.0, trials=trials)
        ratio = mu / mv
        var_ratio = (
            summary.covariance(0, 0) / mv ** 2
            - 2.0 * mu * summary.covariance(0, 1) / mv ** 3
            + mu ** 2 * summary.covariance(1, 1) / mv ** 4
        ) / trials
        std_ratio = math.sqrt(max(var_ratio, 0.0))
        return McEstimate(
            mean=float(np.log2(1.0 + ratio)),
            std_error=std_ratio / ((1.0 + ratio) * math.log(2.0)),
            trials=trials,
        )

    @staticmethod
    def moment_report(scenario: Scenario, phases: PhaseShifts, trials: int, seed: int) -> MomentReport:
        """
        Estimate every expectation behind the closed-form rate and pair it
        with its analytic prediction. Users are numbered from 1.
        """
        MonteCarloService._check_trials(trials, MIN_MOMENT_TRIALS)
        K, M = scenario.K, scenario.M
        pairs = [(k, i) for k in range(K) for i in range(K) if i != k]

        def statistics(batch: ChannelRealization) -> np.ndarray:
            g = ChannelService.cascaded(batch, phases)
            d = batch.d
            z = g + d
            z2 = np.sum(np.abs(z) ** 2, axis=-1)
            g2 = np.sum(np.abs(g) ** 2, axis=-1)
            d2 = np.sum(np.abs(d) ** 2, axis=-1)
            re_dg = np.real(np.sum(d.conj() * g, axis=-1))
            zz = np.abs(np.einsum("bkm,bim->bki", z.conj(), z)) ** 2
            dg = np.abs(np.einsum("bkm,bim->bki", d.conj(), g)) ** 2
            gd = np.abs(np.einsum("bkm,bim->bki", g.conj(), d)) ** 2
            dd = np.abs(np.einsum("bkm,bim->bki", d.conj(), d)) ** 2
            gg = np.abs(np.einsum("bkm,bim->bki", g.conj(), g)) ** 2

            columns = [z2, z2 ** 2, re_dg ** 2, d2, d2 ** 2, g2 * d2, g2, g2 ** 2]
            per_pair = [zz, dg, gd, dd, gg]
            stacked = [column[:, k] for column in columns for k in range(K)]
            stacked += [matrix[:, k, i] for matrix in per_pair for k, i in pairs]
            return np.stack(stacked, axis=-1)

        summary = MonteCarloService._run_blocks(scenario, trials, seed, statistics)

        gamma = scenario.fading.gamma_array
        cascaded = {}
        for k in range(K):
            norm2, norm4, _ = ClosedFormService.cascaded_moments(k + 1, None, phases, scenario)
            cascaded[k] = (norm2, norm4)

        user_predictions: List[Tuple[str, Callable[[int], float]]] = [
            ("noise", lambda k: ClosedFormService.noise_term(k + 1, phases, scenario)),
            ("signal", lambda k: ClosedFormService.signal_term(k + 1, phases, scenario)),
            ("re_dk_gk_sq", lambda k: gamma[k] / 2.0 * cascaded[k][0]),
            ("dk_norm2", lambda k: M * gamma[k]),
            ("dk_norm4", lambda k: (M ** 2 + M) * gamma[k] ** 2),
            ("gk_norm2_dk_norm2", lambda k: M * gamma[k] * cascaded[k][0]),
            ("gk_norm2", lambda k: cascaded[k][0]),
            ("gk_norm4", lambda k: cascaded[k][1]),
        ]
        pair_predictions: List[Tuple[str, Callable[[int, int], float]]] = [
            ("interference", lambda k, i: ClosedFormService.interference_term(k + 1, i + 1, phases, scenario)),
            ("dk_gi_sq", lambda k, i: gamma[k] * cascaded[i][0]),
            ("gk_di_sq", lambda k, i: gamma[i] * cascaded[k][0]),
            ("dk_di_sq", lambda k, i: gamma[i] * gamma[k] * M),
            ("gk_gi_sq", lambda k, i: ClosedFormService.cascaded_moments(k + 1, i + 1, phases, scenario)[2]),
        ]

        report = MomentReport(trials=trials, seed=seed)
        column = 0
        for name, predict in user_predictions:
            for k in range(K):
                report.rows.append(MomentRow(name, k + 1, None, summary.estimate(column), float(predict(k))))
                column += 1
        for name, predict in pair_predictions:
            for k, i in pairs:
                report.rows.append(MomentRow(name, k + 1, i + 1, summary.estimate(column), float(predict(k, i))))
                column += 1

        logger.info(f"Moment report: {len(report.rows)} expectations from {trials} trials")
        return report

    @staticmethod
    def random_phase_rate(scenario: Scenario, k: Optional[int], phase_draws: int, seed: int,
                          trials: Optional[int] = None) -> McEstimate:
        """
        Rate averaged over phase vectors drawn uniformly on [0, 2π)^N, one per
        block. Each draw is scored by the closed form, or by `trials` fading
        draws when given. k=None averages the sum rate.
        """
        if phase_draws < 10:
            raise ScenarioValidationError(f"need at least 10 phase draws, got {phase_draws}")
        idx = None if k is None else _user(k, scenario.K)
        rng = substream(seed, PHASE_STREAM)
        thetas = rng.uniform(0.0, TWO_PI, size=(phase_draws, scenario.N))

        if trials is None:
            rates = ClosedFormService.rates_batch(thetas, scenario)
            samples = rates.sum(axis=-1) if idx is None else rates[:, idx]
        else:
            def score(j: int) -> float:
                phases = PhaseShifts(thetas[j])
                draw_seed = derive_seed(seed, PHASE_STREAM, j)
                if idx is None:
                    return MonteCarloService.sum_rate_mc(scenario, phases, trials, draw_seed).mean
                return MonteCarloService.ergodic_rate_mc(scenario, phases, idx + 1, trials, draw_seed).mean

            samples = np.array([score(j) for j in range(phase_draws)])

        spread = float(np.std(samples, ddof=1))
        logger.info(f"Random-phase rate over {phase_draws} draws (N={scenario.N}): "
                    f"mean={float(np.mean(samples)):.6g}, draw std={spread:.3g}")
        return McEstimate(
            mean=float(np.mean(samples)),
            std_error=spread / math.sqrt(phase_draws),
            trials=phase_draws,
        )
