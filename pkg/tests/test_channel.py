import math

import numpy as np
import pytest

from ris_kit.models.channel import ChannelRealization, PhaseShifts
from ris_kit.services.channel_service import ChannelService
from ris_kit.services.closed_form_service import ClosedFormService
from ris_kit.utils.error_handlers import ConfigError, ScenarioValidationError
from ris_kit.utils.rng import substream


class TestSteeringVector:
    def test_single_element(self):
        assert np.allclose(ChannelService.steering_vector(1, 1.2, 0.3, 0.5), [1.0])

    def test_four_elements_broadside(self):
        a = ChannelService.steering_vector(4, 0.0, 0.0, 0.5)
        assert np.allclose(a, [1, -1, 1, -1])

    def test_unit_modulus(self, rng):
        a = ChannelService.steering_vector(9, *rng.uniform(0, 2 * math.pi, 2), 0.5)
        assert np.allclose(np.abs(a), 1.0)
        assert a[0] == pytest.approx(1.0)

    def test_non_square_rejected(self):
        with pytest.raises(ScenarioValidationError):
            ChannelService.steering_vector(8, 0.0, 0.0, 0.5)


class TestLosComponents:
    def test_scalar_arrays(self, make_scenario):
        los = ChannelService.los_components(make_scenario(M=1, N=1))
        assert np.allclose(los.h_bar, 1.0)
        assert np.allclose(los.H2_bar, 1.0)

    def test_rank_one_with_expected_norm(self, default_scenario):
        los = ChannelService.los_components(default_scenario)
        assert np.linalg.norm(los.H2_bar) == pytest.approx(math.sqrt(49 * 49))
        assert np.linalg.matrix_rank(los.H2_bar) == 1
        assert los.h_bar.shape == (4, 49)


class TestSampling:
    def test_shapes(self, small_scenario):
        batch = ChannelService.sample_batch(small_scenario, substream(0, 1), 5)
        assert batch.batched
        assert batch.H2.shape == (5, 4, 4)
        assert batch.h.shape == (5, 2, 4)
        assert batch.d.shape == (5, 2, 4)
        single = ChannelService.sample_realization(small_scenario, substream(0, 1))
        assert not single.batched

    def test_same_stream_same_draw(self, small_scenario):
        a = ChannelService.sample_batch(small_scenario, substream(5, 1, 0), 3)
        b = ChannelService.sample_batch(small_scenario, substream(5, 1, 0), 3)
        assert np.array_equal(a.H2, b.H2) and np.array_equal(a.d, b.d)

    def test_large_rician_factor_is_los(self, make_scenario):
        scenario = make_scenario(epsilon=1e12)
        los = ChannelService.los_components(scenario)
        h = ChannelService.sample_realization(scenario, substream(1, 1)).h
        expected = np.sqrt(np.asarray(scenario.fading.alpha))[:, None] * los.h_bar
        assert np.max(np.abs(h - expected) / np.abs(expected)) < 1e-4

    def test_zero_gamma_kills_direct_link(self, make_scenario):
        realization = ChannelService.sample_realization(make_scenario(gamma=0.0), substream(1, 1))
        assert not np.any(realization.d)

    def test_direct_link_power(self, small_scenario):
        trials = 100_000
        d = ChannelService.sample_batch(small_scenario, substream(11, 1), trials).d
        power = np.sum(np.abs(d[:, 0, :]) ** 2, axis=-1)
        stderr = power.std(ddof=1) / math.sqrt(trials)
        assert abs(power.mean() - small_scenario.M * small_scenario.fading.gamma[0]) < 4 * stderr


class TestCascaded:
    def test_identity_reflection(self, rng):
        h = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        realization = ChannelRealization(H2=np.eye(3, dtype=complex), h=h, d=np.zeros((2, 3), dtype=complex))
        g = ChannelService.cascaded(realization, PhaseShifts(np.zeros(3)))
        assert np.allclose(g, h)

    def test_los_only_aligned_gain(self, make_scenario):
        scenario = make_scenario(delta=1e12, epsilon=1e12, gamma=0.0, alpha=0.5, beta=0.2)
        phases = ClosedFormService.aligned_phases(1, scenario)
        g = ChannelService.cascaded(ChannelService.sample_realization(scenario, substream(2, 1)), phases)
        expected = 0.5 * 0.2 * scenario.M * scenario.N ** 2
        assert np.sum(np.abs(g[0]) ** 2) == pytest.approx(expected, rel=1e-4)

    def test_phase_periodicity(self, small_scenario, rng):
        theta = rng.uniform(0, 2 * math.pi, small_scenario.N)
        realization = ChannelService.sample_realization(small_scenario, substream(3, 1))
        a = ChannelService.cascaded(realization, PhaseShifts(theta))
        b = ChannelService.cascaded(realization, PhaseShifts(theta + 2 * math.pi))
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)

    def test_batched_matches_single(self, small_scenario):
        batch = ChannelService.sample_batch(small_scenario, substream(4, 1), 3)
        phases = PhaseShifts(np.linspace(0, 3, small_scenario.N))
        g = ChannelService.cascaded(batch, phases)
        single = ChannelRealization(H2=batch.H2[1], h=batch.h[1], d=batch.d[1])
        assert np.allclose(g[1], ChannelService.cascaded(single, phases))

    def test_length_mismatch(self, small_scenario):
        realization = ChannelService.sample_realization(small_scenario, substream(0, 1))
        with pytest.raises(ScenarioValidationError):
            ChannelService.cascaded(realization, PhaseShifts(np.zeros(9)))


class TestPhaseShifts:
    def test_normalized_and_read_only(self):
        phases = PhaseShifts([-0.5, 2 * math.pi, 7.0])
        assert np.all((phases.theta >= 0) & (phases.theta < 2 * math.pi))
        with pytest.raises(ValueError):
            phases.theta[0] = 1.0

    def test_file_roundtrip(self, tmp_path):
        phases = PhaseShifts(np.array([0.1, 1.5, 3.0, 6.0]))
        path = str(tmp_path / "phases.csv")
        ChannelService.save_phases(path, phases)
        assert ChannelService.load_phases(path, N=4) == phases

    def test_load_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            ChannelService.load_phases(str(tmp_path / "nope.csv"))
        path = tmp_path / "short.csv"
        path.write_text("theta\n0.1\n0.2\n", encoding="utf-8")
        with pytest.raises(ScenarioValidationError):
            ChannelService.load_phases(str(path), N=4)

    def test_random_phases_seeded(self):
        a = ChannelService.random_phases(16, substream(9, 3))
        b = ChannelService.random_phases(16, substream(9, 3))
        assert a == b
