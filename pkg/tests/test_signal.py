"""Frame assembly, modulation, and pilot tests.

The assembly oracle is superposition: with handpicked deterministic channels
and zero noise the received matrix can be written down by hand.
"""

import numpy as np
import pytest

from cajsim import signal
from cajsim.signal import ConfigurationError


def cfg_small(**kw):
    defaults = dict(
        k=4, k_t=1, k_j=1, n_tp=8, n_td=6, gamma_ts_db=0.0, gamma_tj_db=0.0
    )
    defaults.update(kw)
    return signal.make_config(**defaults)


class TestQpsk:
    def test_constellation_power_exact(self):
        assert np.allclose(np.abs(signal.QPSK_SYMBOLS) ** 2, 1.0, atol=1e-15)
        syms = signal.qpsk_map(np.arange(4), per_symbol_power=3.0)
        assert np.allclose(np.abs(syms) ** 2, 3.0, atol=1e-12)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        idx = rng.integers(0, 4, 1000)
        syms = signal.qpsk_map(idx, 2.7)
        assert np.array_equal(signal.qpsk_slice(syms), idx)

    def test_slice_quadrants_and_ties(self):
        """Axis points resolve toward the re >= 0, im >= 0 side."""
        pts = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 0 + 0j, 0 + 1j, -1 + 0j, 0 - 1j])
        assert np.array_equal(signal.qpsk_slice(pts), [0, 1, 2, 3, 0, 0, 1, 3])

    def test_modulate_from_rng_and_stream(self):
        a = signal.qpsk_modulate(np.random.default_rng(3), 64, 1.0)
        b = signal.qpsk_modulate(np.random.default_rng(3), 64, 1.0)
        assert np.array_equal(a, b)
        c = signal.qpsk_modulate([0, 1, 2, 3], 4, 1.0)
        assert np.array_equal(c, signal.qpsk_map(np.arange(4)))
        with pytest.raises(ValueError):
            signal.qpsk_modulate([0, 1], 4, 1.0)

    def test_map_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            signal.qpsk_map(np.array([0, 4]))


class TestPilots:
    def test_exact_orthogonality(self):
        p = signal.make_pilots(16, 4, 2.0)
        gram = p.conj().T @ p
        expected = 16 * 2.0 * np.eye(4)
        assert np.max(np.abs(gram - expected)) < 1e-9

    def test_constant_modulus(self):
        p = signal.make_pilots(20, 3, 0.5)
        assert np.allclose(np.abs(p) ** 2, 0.5, atol=1e-12)

    def test_first_column_constant(self):
        p = signal.make_pilots(10, 2, 1.0)
        assert np.allclose(p[:, 0], p[0, 0], atol=1e-15)

    def test_rejects_short_block(self):
        with pytest.raises(ConfigurationError):
            signal.make_pilots(3, 3, 1.0)


class TestFrameConfig:
    def test_derived_powers(self):
        cfg = cfg_small(gamma_ts_db=10.0, gamma_tj_db=20.0)
        assert abs(cfg.p_s - 10.0) < 1e-12
        assert abs(cfg.p_j - 100.0) < 1e-12
        assert cfg.n_tf == 14

    @pytest.mark.parametrize(
        "kw, fragment",
        [
            (dict(k=1), "k must be"),
            (dict(k_j=0), "k_j"),
            (dict(k_j=4), "k_j"),
            (dict(k=4, k_j=3, k_t=2), "k - k_j"),
            (dict(n_tp=1, k_t=2), "k_t"),
            (dict(n_tp=4), "cluster size"),
            (dict(n_td=0), "n_td"),
        ],
    )
    def test_invariants_rejected_with_field_names(self, kw, fragment):
        with pytest.raises(ConfigurationError, match=fragment):
            cfg_small(**kw)

    def test_fading_spec_consistency_enforced(self):
        from cajsim.channel import FadingSpec

        with pytest.raises(ConfigurationError, match="fading_h"):
            signal.FrameConfig(
                k=4, k_t=1, k_j=1, n_tp=8, n_td=6,
                gamma_ts_db=0.0, gamma_tj_db=0.0,
                fading_h=FadingSpec(kind="block", n_symbols=3, n_data=1),
                fading_g=FadingSpec(kind="block", n_symbols=14, n_data=6),
            )

    def test_equal_streams_and_nulls_accepted(self):
        cfg = cfg_small(k=4, k_j=2, k_t=2, n_tp=8)
        assert cfg.k - cfg.k_j == cfg.k_t


class TestAssembly:
    def test_superposition_by_hand(self):
        """k=2, one TN with channel e0, one JN with channel e1, no noise:
        row 0 is the TN waveform, row 1 the jammer waveform."""
        cfg = signal.make_config(
            k=2, k_t=1, k_j=1, n_tp=4, n_td=3, gamma_ts_db=0.0, gamma_tj_db=0.0
        )
        n_tf = cfg.n_tf
        h = np.zeros((1, 2, n_tf), complex)
        h[0, 0, :] = 1.0
        g = np.zeros((1, 2, n_tf), complex)
        g[0, 1, :] = 1.0
        tn = np.array([[0, 1, 2]])
        jn = np.arange(n_tf)[None, :] % 4
        frame = signal.assemble_frame(
            cfg, h, g, tn, jn, None, noise=np.zeros((2, n_tf), complex)
        )
        pilots = signal.make_pilots(4, 1, 1.0)
        assert np.allclose(frame.y_tp[0], pilots[:, 0], atol=1e-12)
        assert np.allclose(frame.y_td[0], signal.qpsk_map(tn[0]), atol=1e-12)
        jam = signal.qpsk_map(jn[0])
        assert np.allclose(frame.y_tp[1], jam[:4], atol=1e-12)
        assert np.allclose(frame.y_td[1], jam[4:], atol=1e-12)

    def test_no_jammer_path(self):
        cfg = cfg_small()
        h = np.ones((1, 4, cfg.n_tf), complex)
        frame = signal.assemble_frame(
            cfg, h, None, np.zeros((1, 6), int), None, np.random.default_rng(0)
        )
        assert frame.g_gains is None and frame.jn_indices is None

    def test_shape_checks_name_offender(self):
        cfg = cfg_small()
        with pytest.raises(ConfigurationError, match="h_gains"):
            signal.assemble_frame(
                cfg, np.ones((2, 4, cfg.n_tf), complex), None,
                np.zeros((1, 6), int), None, np.random.default_rng(0),
            )

    def test_noise_hook_gives_exact_noiseless_frame(self):
        cfg = cfg_small()
        rng = np.random.default_rng(5)
        frame = signal.simulate_frame(cfg, rng)
        assert frame.y_tp.shape == (4, 8) and frame.y_td.shape == (4, 6)

    def test_simulate_frame_deterministic(self):
        cfg = cfg_small(gamma_tj_db=30.0)
        f1 = signal.simulate_frame(cfg, np.random.default_rng(77))
        f2 = signal.simulate_frame(cfg, np.random.default_rng(77))
        assert np.array_equal(f1.y_tp, f2.y_tp)
        assert np.array_equal(f1.y_td, f2.y_td)
        assert np.array_equal(f1.tn_indices, f2.tn_indices)

    def test_received_power_budget(self):
        """Mean received energy per symbol approximates p_s + p_j + sigma2
        for unit-variance channels."""
        cfg = cfg_small(gamma_ts_db=3.0, gamma_tj_db=7.0)
        rng = np.random.default_rng(8)
        total = 0.0
        trials = 400
        for _ in range(trials):
            f = signal.simulate_frame(cfg, rng)
            total += np.mean(np.abs(np.hstack([f.y_tp, f.y_td])) ** 2)
        expected = cfg.p_s + cfg.p_j + cfg.sigma2
        assert abs(total / trials - expected) / expected < 0.05
