import math

import numpy as np
import pytest

from ris_kit.models.channel import PhaseShifts
from ris_kit.models.rate import SymmetricPair
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.services.scenario_service import ScenarioService
from ris_kit.utils.error_handlers import DomainError, ScenarioValidationError
from ris_kit.utils.rng import substream


def random_phases(N, seed=0):
    return PhaseShifts(substream(seed, 3).uniform(0, 2 * math.pi, N))


def fixed_angles(K, kr_a=None, kr_e=None, t_a=0.4, t_e=1.1):
    return {
        "phi_r_a": 0.3, "phi_r_e": 0.9, "phi_t_a": t_a, "phi_t_e": t_e,
        "phi_kr_a": kr_a if kr_a is not None else [0.2 + 0.7 * k for k in range(K)],
        "phi_kr_e": kr_e if kr_e is not None else [1.3 - 0.2 * k for k in range(K)],
    }


class TestArrayGain:
    def test_first_element_offset_is_zero(self, small_scenario):
        for k in (1, 2):
            assert ClosedFormService.zeta(1, k, small_scenario) == 0.0

    def test_users_facing_departure_direction(self, make_scenario):
        angles = fixed_angles(2, kr_a=[0.4, 0.4], kr_e=[1.1, 1.1])
        scenario = make_scenario(angles=angles)
        assert np.allclose(ClosedFormService.zeta_matrix(scenario), 0.0)

    def test_offset_index_map(self, make_scenario):
        half = math.pi / 2
        angles = fixed_angles(2, kr_a=[half, half], kr_e=[half, half], t_a=0.0, t_e=half)
        scenario = make_scenario(angles=angles)
        assert np.allclose(ClosedFormService.zeta_matrix(scenario)[0], [0, 0, math.pi, math.pi])

    def test_aligned_phases_give_full_gain(self, default_scenario):
        for k in (1, 3):
            f = ClosedFormService.f_of_phi(ClosedFormService.aligned_phases(k, default_scenario), k, default_scenario)
            assert f.real == pytest.approx(49.0)
            assert f.imag == pytest.approx(0.0, abs=1e-9)

    def test_opposite_phasors_cancel(self, make_scenario):
        angles = fixed_angles(2, kr_a=[0.4, 0.4], kr_e=[1.1, 1.1])
        scenario = make_scenario(angles=angles)
        f = ClosedFormService.f_of_phi(PhaseShifts([0, math.pi, 0, math.pi]), 1, scenario)
        assert abs(f) == pytest.approx(0.0, abs=1e-12)

    def test_gain_bounded_by_array_size(self, default_scenario):
        thetas = substream(1, 3).uniform(0, 2 * math.pi, (50, 49))
        assert np.all(np.abs(ClosedFormService.f_batch(thetas, default_scenario)) <= 49 + 1e-9)

    def test_array_gains(self, small_scenario):
        gains = ClosedFormService.array_gains(random_phases(4), small_scenario)
        assert gains.f.shape == (2,)
        assert gains.zeta.shape == (2, 4)
        assert gains.c == pytest.approx(ScenarioService.composite_path_loss(small_scenario))

    def test_wrong_phase_length(self, small_scenario):
        with pytest.raises(ScenarioValidationError):
            ClosedFormService.sum_rate(PhaseShifts(np.zeros(9)), small_scenario)

    def test_user_index_checked(self, small_scenario):
        with pytest.raises(IndexError):
            ClosedFormService.signal_term(3, random_phases(4), small_scenario)
        with pytest.raises(IndexError):
            ClosedFormService.zeta(5, 1, small_scenario)


class TestExpectations:
    def test_signal_direct_only(self, make_scenario):
        scenario = ScenarioService.with_overrides(make_scenario(gamma=1.0), alpha=0.0)
        assert ClosedFormService.signal_term(1, random_phases(4), scenario) == pytest.approx(20.0)

    def test_signal_pure_nlos(self, make_scenario):
        scenario = make_scenario(delta=0.0, epsilon=0.0, gamma=0.0, alpha=0.5, beta=0.2)
        M, N, c = 4, 4, 0.1
        expected = M * c ** 2 * (M * N ** 2 + N ** 2 + M * N + N)
        assert ClosedFormService.signal_term(1, random_phases(4), scenario) == pytest.approx(expected, rel=1e-12)

    def test_interference_direct_only(self, small_scenario):
        scenario = ScenarioService.with_overrides(small_scenario, alpha=0.0)
        value = ClosedFormService.interference_term(1, 2, random_phases(4), scenario)
        assert value == pytest.approx(4 * 0.5 * 0.8)

    def test_interference_symmetric(self, default_scenario):
        phases = random_phases(49, seed=4)
        for k, i in ((1, 2), (2, 4), (1, 3)):
            a = ClosedFormService.interference_term(k, i, phases, default_scenario)
            b = ClosedFormService.interference_term(i, k, phases, default_scenario)
            assert a == pytest.approx(b, rel=1e-12)

    def test_interference_needs_distinct_users(self, small_scenario):
        with pytest.raises(ValueError):
            ClosedFormService.interference_term(1, 1, random_phases(4), small_scenario)

    def test_noise_direct_only(self, make_scenario):
        scenario = ScenarioService.with_overrides(
            make_scenario(M=49, gamma=2.0), alpha=0.0
        )
        assert ClosedFormService.noise_term(1, random_phases(4), scenario) == pytest.approx(98.0)

    def test_noise_pure_nlos(self, make_scenario):
        scenario = make_scenario(delta=0.0, epsilon=0.0, gamma=0.0, alpha=0.5, beta=0.2)
        assert ClosedFormService.noise_term(2, random_phases(4), scenario) == pytest.approx(4 * 0.1 * 4)

    def test_breakdown_consistent(self, default_scenario):
        phases = random_phases(49, seed=2)
        breakdown = ClosedFormService.rate_breakdown(phases, default_scenario)
        assert breakdown.K == 4
        assert np.all(np.diag(breakdown.interference) == 0)
        assert breakdown.signal[2] == pytest.approx(ClosedFormService.signal_term(3, phases, default_scenario))
        assert breakdown.sum_rate == pytest.approx(ClosedFormService.sum_rate(phases, default_scenario))
        assert breakdown.rate[0] == pytest.approx(ClosedFormService.ergodic_rate(1, phases, default_scenario))


class TestRates:
    def test_zero_power_zero_rate(self, make_scenario):
        scenario = make_scenario(p_watt=0.0)
        assert ClosedFormService.ergodic_rate(1, random_phases(4), scenario) == 0.0
        assert ClosedFormService.sum_rate(random_phases(4), scenario) == 0.0

    def test_single_user_direct_only(self, make_scenario):
        scenario = ScenarioService.with_overrides(
            make_scenario(K=1, epsilon=2.0, alpha=1.0, gamma=0.3, p_watt=2.0, sigma2_watt=0.5), alpha=0.0
        )
        expected = math.log2(1 + 2.0 * (4 + 1) * 0.3 / 0.5)
        assert ClosedFormService.ergodic_rate(1, random_phases(4), scenario) == pytest.approx(expected, rel=1e-12)

    def test_single_user_sum_rate(self, make_scenario):
        scenario = make_scenario(K=1, epsilon=2.0, alpha=1.0, gamma=0.3)
        phases = random_phases(4)
        assert ClosedFormService.sum_rate(phases, scenario) == pytest.approx(
            ClosedFormService.ergodic_rate(1, phases, scenario)
        )

    def test_user_relabeling(self, make_scenario):
        angles = fixed_angles(3)
        forward = dict(epsilon=[1.0, 2.0, 5.0], alpha=[1.0, 0.5, 2.0], gamma=[0.1, 0.2, 0.3],
                       p_watt=[1.0, 2.0, 0.5], angles=angles)
        reverse = {key: list(reversed(value)) for key, value in forward.items() if key != "angles"}
        reverse["angles"] = dict(angles, phi_kr_a=angles["phi_kr_a"][::-1], phi_kr_e=angles["phi_kr_e"][::-1])
        phases = random_phases(4, seed=8)
        a = ClosedFormService.sum_rate(phases, make_scenario(K=3, **forward))
        b = ClosedFormService.sum_rate(phases, make_scenario(K=3, **reverse))
        assert a == pytest.approx(b, rel=1e-12)

    def test_vanishing_denominator(self, make_scenario):
        scenario = ScenarioService.with_overrides(make_scenario(K=1, epsilon=1.0, alpha=1.0, gamma=1.0), sigma2=0.0)
        with pytest.raises(DomainError):
            ClosedFormService.sum_rate(random_phases(4), scenario)

    def test_silent_user_does_not_break_others(self, make_scenario):
        scenario = make_scenario(gamma=[0.5, 0.0])
        without_ris = ScenarioService.with_overrides(scenario, alpha=0.0)
        phases = random_phases(4)
        expected = ClosedFormService.rate_no_ris(1, scenario)
        assert expected == pytest.approx(math.log2(3.5))
        assert ClosedFormService.ergodic_rate(1, phases, without_ris) == pytest.approx(expected, rel=1e-12)
        assert ClosedFormService.ergodic_rate(2, phases, without_ris) == 0.0
        assert ClosedFormService.sum_rate(phases, without_ris) == pytest.approx(expected, rel=1e-12)
        assert ClosedFormService.rate_breakdown(phases, without_ris).sinr[1] == 0.0

    def test_vanishing_denominator_only_fails_that_user(self, make_scenario):
        scenario = ScenarioService.with_overrides(make_scenario(gamma=[0.5, 0.0]), alpha=0.0, sigma2=0.0)
        phases = random_phases(4)
        with pytest.raises(DomainError):
            ClosedFormService.ergodic_rate(1, phases, scenario)
        assert ClosedFormService.ergodic_rate(2, phases, scenario) == 0.0

    def test_rate_grows_with_power(self, make_scenario):
        phases = random_phases(4, seed=6)
        rates = [
            ClosedFormService.ergodic_rate(1, phases, make_scenario(K=1, epsilon=2.0, alpha=1.0, gamma=0.5, p_watt=p))
            for p in (0.0, 1e-3, 0.1, 1.0, 10.0, 1e3)
        ]
        assert all(b >= a for a, b in zip(rates, rates[1:]))
        assert rates[0] == 0.0 < rates[-1]

    def test_aligned_phases_beat_random_draws(self, make_scenario):
        scenario = make_scenario(K=1, epsilon=2.0, alpha=1.0, gamma=0.5)
        aligned = ClosedFormService.sum_rate(ClosedFormService.aligned_phases(1, scenario), scenario)
        thetas = substream(13, 3).uniform(0, 2 * math.pi, (100_000, 4))
        assert float(np.max(ClosedFormService.sum_rate_batch(thetas, scenario))) <= aligned + 1e-9

    def test_full_turn_changes_nothing(self, default_scenario):
        thetas = substream(14, 3).uniform(0, 2 * math.pi, (3, 49))
        turned = thetas + 2 * math.pi
        assert np.allclose(ClosedFormService.sum_rate_batch(turned, default_scenario),
                           ClosedFormService.sum_rate_batch(thetas, default_scenario), rtol=1e-9, atol=0)
        for before, after in zip(ClosedFormService.terms_batch(thetas, default_scenario),
                                 ClosedFormService.terms_batch(turned, default_scenario)):
            assert np.allclose(np.asarray(after, dtype=float), np.asarray(before, dtype=float), rtol=1e-9, atol=1e-300)

    def test_batch_matches_single(self, default_scenario):
        thetas = substream(6, 3).uniform(0, 2 * math.pi, (5, 49))
        batch = ClosedFormService.sum_rate_batch(thetas, default_scenario)
        assert batch[3] == pytest.approx(ClosedFormService.sum_rate(PhaseShifts(thetas[3]), default_scenario))


class TestNoRis:
    def test_symmetric_pair(self, make_scenario):
        scenario = make_scenario(M=49, gamma=1.0, p_watt=1.0, sigma2_watt=1.0)
        assert ClosedFormService.sinr_no_ris(1, scenario) == pytest.approx(25.0)
        assert ClosedFormService.rate_no_ris(1, scenario) == pytest.approx(4.700, abs=1e-3)

    def test_no_direct_link(self, make_scenario):
        assert ClosedFormService.rate_no_ris(2, make_scenario(gamma=0.0)) == 0.0

    def test_matches_closed_form_without_ris(self, default_scenario):
        without_ris = ScenarioService.with_overrides(default_scenario, alpha=0.0)
        phases = random_phases(49)
        for k in range(1, 5):
            assert ClosedFormService.ergodic_rate(k, phases, without_ris) == pytest.approx(
                ClosedFormService.rate_no_ris(k, default_scenario), rel=1e-10
            )


class TestPureNlos:
    def test_single_user_no_direct(self, make_scenario):
        scenario = make_scenario(K=1, delta=0.0, epsilon=0.0, alpha=0.5, beta=0.2, gamma=0.0,
                                 p_watt=3.0, sigma2_watt=0.25)
        M, N, c = 4, 4, 0.1
        assert ClosedFormService.sinr_nlos(1, scenario) == pytest.approx(3.0 * c * (M + 1) * (N + 1) / 0.25)

    def test_reduces_to_no_ris(self, small_scenario):
        without_ris = ScenarioService.with_overrides(small_scenario, alpha=0.0)
        assert ClosedFormService.sinr_nlos(1, without_ris) == pytest.approx(
            ClosedFormService.sinr_no_ris(1, small_scenario), rel=1e-12
        )

    def test_matches_general_closed_form(self, make_scenario):
        scenario = make_scenario(K=3, delta=0.0, epsilon=0.0, alpha=[1.0, 0.5, 2.0], gamma=[0.1, 0.2, 0.3],
                                 p_watt=[1.0, 2.0, 0.5], angles=fixed_angles(3))
        sinr = ClosedFormService.rate_breakdown(random_phases(4, seed=3), scenario).sinr
        for k in range(1, 4):
            assert ClosedFormService.sinr_nlos(k, scenario) == pytest.approx(sinr[k - 1], rel=1e-10)

    def test_crossover_thresholds(self):
        pair = SymmetricPair(M=49, N=49, c=1e-6, gamma=1e-6, p=1.0, sigma2=1.0)
        snr_threshold, _ = ClosedFormService.nlos_crossover(pair)
        assert snr_threshold == pytest.approx(1.0625e6)
        small = SymmetricPair(M=2, N=16, c=1.0, gamma=1.0, p=1.0, sigma2=1.0)
        assert ClosedFormService.nlos_crossover(small)[0] == pytest.approx(16 + 2)

    def test_crossover_needs_two_antennas(self):
        with pytest.raises(DomainError):
            ClosedFormService.nlos_crossover(SymmetricPair(M=1, N=4, c=1.0, gamma=1.0, p=1.0, sigma2=1.0))
        with pytest.raises(DomainError):
            ClosedFormService.nlos_crossover(SymmetricPair(M=4, N=4, c=0.0, gamma=1.0, p=1.0, sigma2=1.0))

    @pytest.mark.parametrize("factor, ris_wins", [(0.5, True), (2.0, False)])
    def test_crossover_ordering(self, make_scenario, factor, ris_wins):
        # c = αβ = 1e-6 when δ = ε = 0
        base = make_scenario(M=49, N=49, K=2, delta=0.0, epsilon=0.0, alpha=1e-3, beta=1e-3,
                             gamma=1e-6, p_watt=1.0, sigma2_watt=1.0)
        pair = ClosedFormService.symmetric_pair(base)
        assert pair.c == pytest.approx(1e-6)
        threshold, _ = ClosedFormService.nlos_crossover(pair)
        scenario = ScenarioService.with_overrides(base, p=factor * threshold)
        ris = ClosedFormService.sinr_nlos(1, scenario)
        assert (ris > ClosedFormService.sinr_no_ris(1, scenario)) is ris_wins
        closed_form = ClosedFormService.rate_breakdown(random_phases(49), scenario).rate[0]
        assert (closed_form > ClosedFormService.rate_no_ris(1, scenario)) is ris_wins


class TestRandomPhaseLimit:
    def test_no_los_gives_array_gain(self, make_scenario):
        scenario = make_scenario(M=49, delta=0.0, alpha=1.0, p_watt=1.0)
        assert ClosedFormService.sinr_random_limit(1, scenario) == pytest.approx(50.0)

    def test_unit_rician_factor(self, make_scenario):
        scenario = make_scenario(M=49, delta=1.0, alpha=1.0, p_watt=1.0)
        assert ClosedFormService.sinr_random_limit(2, scenario) == pytest.approx(248 / 52)
        assert ClosedFormService.rate_random_limit(2, scenario) == pytest.approx(math.log2(1 + 248 / 52))

    def test_strong_los_limit(self, make_scenario):
        scenario = make_scenario(M=49, delta=1e6, alpha=1.0, p_watt=1.0)
        assert ClosedFormService.sinr_random_limit(1, scenario) == pytest.approx(2.0, rel=1e-4)

    def test_needs_an_interferer(self, make_scenario):
        with pytest.raises(DomainError):
            ClosedFormService.sinr_random_limit(1, make_scenario(K=1, epsilon=1.0, alpha=1.0, gamma=1.0))

    def test_random_crossover(self):
        pair = SymmetricPair(M=49, N=49, c=1.0, gamma=1.0, p=1.0, sigma2=1.0, delta=1.0)
        assert ClosedFormService.random_crossover(pair) == pytest.approx(248 / 2352)
        pair = SymmetricPair(M=2, N=49, c=1.0, gamma=1.0, p=1.0, sigma2=1.0, delta=1.0)
        assert ClosedFormService.random_crossover(pair) == pytest.approx(6.5)

    def test_random_crossover_vanishes_with_m(self):
        M = 10 ** 6
        pair = SymmetricPair(M=M, N=49, c=1.0, gamma=1.0, p=1.0, sigma2=1.0, delta=1.0)
        assert ClosedFormService.random_crossover(pair) == pytest.approx(5.0 / M, rel=1e-3)

    def test_random_crossover_domain(self):
        with pytest.raises(DomainError):
            ClosedFormService.random_crossover(SymmetricPair(M=49, N=4, c=1.0, gamma=1.0, p=1.0, sigma2=1.0))


class TestCascadedMoments:
    def test_pure_nlos_power(self, make_scenario):
        scenario = make_scenario(delta=0.0, epsilon=0.0, alpha=0.5, beta=0.2)
        norm2, _, cross = ClosedFormService.cascaded_moments(1, None, random_phases(4), scenario)
        assert norm2 == pytest.approx(4 * 0.1 * 4)
        assert cross is None

    def test_los_dominant_fourth_moment(self, make_scenario):
        scenario = make_scenario(M=9, N=9, delta=1e4, epsilon=1e4)
        phases = ClosedFormService.aligned_phases(1, scenario)
        _, norm4, _ = ClosedFormService.cascaded_moments(1, 2, phases, scenario)
        c = ScenarioService.composite_path_loss(scenario)[0]
        leading = 9 ** 2 * c ** 2 * 1e8 * 1e8 * 9 ** 4
        assert norm4 == pytest.approx(leading, rel=1e-2)

    def test_ignores_direct_links(self, small_scenario):
        phases = random_phases(4)
        without_direct = ScenarioService.with_overrides(small_scenario, gamma=0.0)
        assert ClosedFormService.cascaded_moments(1, 2, phases, small_scenario) == pytest.approx(
            ClosedFormService.cascaded_moments(1, 2, phases, without_direct)
        )
