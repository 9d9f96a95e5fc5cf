import numpy as np
import pytest

from risloc import (
    SystemConfig,
    UePosition,
    effective_channel,
    equalize,
    exact_channel,
    fresnel_channel,
    make_reference_sequence,
    optimal_phase,
    simulate_received,
)
from risloc.refinement import model_vector
from risloc.signaling import Observation, ReferenceSequence
from tests.conftest import random_position


class TestReferenceSequence:
    def test_scalar_case(self):
        s = make_reference_sequence(SystemConfig(n_y=1, n_z=1, k_ue=1))
        assert s.entries.shape == (1, 1)
        assert s.entries[0, 0] == pytest.approx(1.0 + 0.0j, abs=1e-14)

    def test_gram_constraint(self):
        cfg = SystemConfig(k_ue=4, l_slots=4)
        s = make_reference_sequence(cfg)
        gram = s.entries @ s.entries.conj().T
        assert np.allclose(gram, 0.25 * np.eye(4), atol=1e-12)

    def test_pseudo_inverse_is_right_inverse(self):
        # verified by multiplication: S (K / P_T) S^H = I
        for l_slots in (8, 12):
            cfg = SystemConfig(k_ue=8, l_slots=l_slots)
            s = make_reference_sequence(cfg)
            s_pinv = (s.k / s.p_t) * s.entries.conj().T
            assert np.allclose(s.entries @ s_pinv, np.eye(8), atol=1e-10)
            # matches the generic pseudo-inverse
            assert np.allclose(s_pinv, np.linalg.pinv(s.entries), atol=1e-10)

    def test_recovered_power(self):
        cfg = SystemConfig(p_t=2.5)
        assert make_reference_sequence(cfg).p_t == pytest.approx(2.5, rel=1e-12)

    def test_rejects_short_block(self):
        with pytest.raises(ValueError):
            SystemConfig(k_ue=8, l_slots=4)
        with pytest.raises(ValueError):
            ReferenceSequence(np.ones((4, 2), dtype=complex))

    def test_rejects_non_orthogonal_rows(self):
        with pytest.raises(ValueError):
            ReferenceSequence(np.ones((2, 2), dtype=complex))


class TestSimulateReceived:
    def test_noiseless(self, cfg, rng):
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        y = simulate_received(a, optimal_phase(cfg.n), s, 0.0, 0)
        expected = a.entries.conj().T @ a.entries @ s.entries
        assert np.allclose(y, expected, atol=1e-12)

    def test_seed_determinism(self, cfg, rng):
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        y1 = simulate_received(a, optimal_phase(cfg.n), s, 0.3, 42)
        y2 = simulate_received(a, optimal_phase(cfg.n), s, 0.3, 42)
        assert np.array_equal(y1, y2)
        y3 = simulate_received(a, optimal_phase(cfg.n), s, 0.3, 43)
        assert not np.array_equal(y1, y3)

    def test_noise_moment(self, rng):
        # 1e5 noise entries via a wide slot block; mean |W|^2 within 1% of
        # sigma2 (relative std of the mean is ~0.3% at this sample size)
        cfg = SystemConfig(k_ue=8, l_slots=12500)
        pos = random_position(cfg, rng)
        a = exact_channel(cfg, pos)
        s = make_reference_sequence(cfg)
        sigma2 = 0.7
        noiseless = a.entries.conj().T @ a.entries @ s.entries
        w = simulate_received(a, optimal_phase(cfg.n), s, sigma2, 2024) - noiseless
        assert w.size == 100_000
        assert np.mean(np.abs(w) ** 2) == pytest.approx(sigma2, rel=0.01)

    def test_rejects_negative_variance(self, cfg, rng):
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        with pytest.raises(ValueError):
            simulate_received(a, optimal_phase(cfg.n), s, -1.0, 0)

    def test_rejects_dimension_mismatch(self, cfg, rng):
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        with pytest.raises(ValueError):
            simulate_received(a, optimal_phase(cfg.n + 1), s, 0.0, 0)
        s_small = make_reference_sequence(SystemConfig(k_ue=4))
        with pytest.raises(ValueError):
            simulate_received(a, optimal_phase(cfg.n), s_small, 0.0, 0)


class TestEqualize:
    def test_noiseless_round_trip(self, cfg, rng):
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        y = simulate_received(a, optimal_phase(cfg.n), s, 0.0, 0)
        obs = equalize(y, s, 0.0)
        expected = effective_channel(a).flatten(order="F")
        assert np.allclose(obs.y_tilde, expected, atol=1e-10)

    def test_scalar_observation(self, rng):
        cfg = SystemConfig(k_ue=1)
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        y = simulate_received(a, optimal_phase(cfg.n), s, 0.05, 9)
        obs = equalize(y, s, 0.05)
        assert obs.y_tilde.shape == (1,)
        assert obs.y_tilde[0] == pytest.approx(cfg.n, abs=2.0)

    def test_vectorization_order_matches_model(self, cfg, rng):
        # cross-module fixture: index i = (q-1)K + p must line up with the
        # Fresnel model vector
        pos = random_position(cfg, rng)
        a = fresnel_channel(cfg, pos)
        s = make_reference_sequence(cfg)
        y = simulate_received(a, optimal_phase(cfg.n), s, 0.0, 0)
        obs = equalize(y, s, 0.0)
        z = model_vector(cfg, pos.r, pos.theta)
        assert np.allclose(obs.y_tilde, z, atol=1e-9 * np.linalg.norm(z))

    def test_equalized_noise_variance(self, cfg):
        # per-entry variance sigma2 * K / P_T for L = K, checked empirically
        s = make_reference_sequence(cfg)
        sigma2 = 0.4
        rng = np.random.default_rng(77)
        samples = []
        for _ in range(300):
            w = np.sqrt(sigma2 / 2) * (
                rng.standard_normal((cfg.k_ue, cfg.l_slots))
                + 1j * rng.standard_normal((cfg.k_ue, cfg.l_slots))
            )
            obs = equalize(w, s, sigma2)
            samples.append(np.abs(obs.y_tilde) ** 2)
        measured = np.mean(samples)
        assert measured == pytest.approx(sigma2 * cfg.k_ue / cfg.p_t, rel=0.03)

    def test_snr_bookkeeping(self, cfg, rng):
        a = exact_channel(cfg, random_position(cfg, rng))
        s = make_reference_sequence(cfg)
        y = simulate_received(a, optimal_phase(cfg.n), s, 0.1, 0)
        obs = equalize(y, s, 0.1)
        assert obs.sigma2 == 0.1
        assert obs.snr_db == pytest.approx(10.0)

    def test_rejects_dimension_mismatch(self, cfg):
        s = make_reference_sequence(cfg)
        with pytest.raises(ValueError):
            equalize(np.zeros((cfg.k_ue, s.l + 1), dtype=complex), s)
        with pytest.raises(ValueError):
            equalize(np.zeros((cfg.k_ue + 1, s.l), dtype=complex), s)

    def test_observation_length_validation(self):
        with pytest.raises(ValueError):
            Observation(np.zeros(5, dtype=complex), 10.0, 0.1)
