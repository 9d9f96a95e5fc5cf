import math

import numpy as np
import pytest

from risloc import (
    ExperimentConfig,
    SystemConfig,
    export_csv,
    near_field_bounds,
    read_csv,
    run_nmse,
    sample_ue,
)
from risloc.experiments import THETA_SECTOR, config_for_point


class TestSampleUe:
    def test_bounds_coverage(self, cfg):
        rng = np.random.default_rng(0)
        fresnel, rayleigh = near_field_bounds(cfg)
        rs = np.array([sample_ue(cfg, rng).r for _ in range(100_000)])
        span = rayleigh - fresnel
        assert rs.min() <= fresnel + 0.001 * span
        assert rs.max() >= rayleigh - 0.001 * span
        assert np.all((rs >= fresnel) & (rs <= rayleigh))

    def test_sector(self, cfg):
        rng = np.random.default_rng(1)
        thetas = np.array([sample_ue(cfg, rng).theta for _ in range(10_000)])
        assert np.all(np.abs(thetas) <= THETA_SECTOR)
        assert thetas.max() > 0.95 * THETA_SECTOR
        assert thetas.min() < -0.95 * THETA_SECTOR

    def test_seed_determinism(self, cfg):
        a = [sample_ue(cfg, np.random.default_rng(7)) for _ in range(3)]
        b = [sample_ue(cfg, np.random.default_rng(7)) for _ in range(3)]
        assert [(p.r, p.theta) for p in a] == [(p.r, p.theta) for p in b]


class TestConfigForPoint:
    def test_square_layout(self, cfg):
        out = config_for_point(cfg, 144, 12)
        assert (out.n_y, out.n_z, out.k_ue, out.l_slots) == (12, 12, 12, 12)

    def test_rejects_non_square(self, cfg):
        with pytest.raises(ValueError, match="perfect square"):
            config_for_point(cfg, 60, 8)


class TestRunNmse:
    def test_noiseless_fixed_point(self, cfg):
        exp = ExperimentConfig(
            base=cfg, snr_db_list=(math.inf,), epsilon_list=(0.55,), trials=20,
            master_seed=5,
        )
        rows = run_nmse(exp, start_at_truth=True)
        assert rows[0].nmse_r < 1e-10
        assert rows[0].nmse_theta < 1e-10
        assert rows[0].conv_rate == 1.0

    def test_row_per_sweep_point(self, cfg):
        exp = ExperimentConfig(
            base=cfg, snr_db_list=(10.0, 20.0), n_list=(64,), k_list=(8,),
            epsilon_list=(0.55, 1.1), trials=3, master_seed=0,
        )
        rows = run_nmse(exp)
        assert len(rows) == 4
        assert [(r.snr_db, r.epsilon) for r in rows] == [
            (10.0, 0.55), (10.0, 1.1), (20.0, 0.55), (20.0, 1.1),
        ]

    def test_deterministic_across_runs_and_workers(self, cfg):
        exp = ExperimentConfig(
            base=cfg, snr_db_list=(10.0,), epsilon_list=(0.55,), trials=12,
            master_seed=3,
        )
        rows1 = run_nmse(exp, workers=1)
        rows2 = run_nmse(exp, workers=1)
        rows3 = run_nmse(exp, workers=3)
        assert rows1 == rows2
        assert rows1 == rows3

    def test_seed_changes_results(self, cfg):
        base = dict(base=cfg, snr_db_list=(10.0,), epsilon_list=(0.55,), trials=8)
        rows_a = run_nmse(ExperimentConfig(**base, master_seed=1))
        rows_b = run_nmse(ExperimentConfig(**base, master_seed=2))
        assert rows_a[0].nmse_r != rows_b[0].nmse_r

    def test_disjoint_seed_blocks_agree(self, cfg):
        # two independent 250-trial blocks: NMSE within 3 combined standard
        # errors (delta-method SE of the moment-normalized ratio)
        def block(seed):
            exp = ExperimentConfig(
                base=cfg, snr_db_list=(10.0,), epsilon_list=(0.55,), trials=250,
                master_seed=seed,
            )
            rows, recs = run_nmse(exp, keep_records=True)
            sq = np.array([(t.r_hat - t.true_r) ** 2 for t in recs[0]])
            denom = np.sum([t.true_r**2 for t in recs[0]])
            se = np.std(sq) * math.sqrt(len(sq)) / denom
            return rows[0].nmse_r, se

        nmse1, se1 = block(101)
        nmse2, se2 = block(202)
        assert abs(nmse1 - nmse2) < 3 * math.hypot(se1, se2)

    def test_convergence_rate_at_10db(self, cfg):
        exp = ExperimentConfig(
            base=cfg, snr_db_list=(10.0,), epsilon_list=(0.55,), trials=60,
            master_seed=0,
        )
        rows = run_nmse(exp)
        assert rows[0].conv_rate >= 0.95

    def test_relative_normalization_switch(self, cfg):
        exp = ExperimentConfig(
            base=cfg, snr_db_list=(10.0,), epsilon_list=(0.55,), trials=10,
            master_seed=4, nmse_normalization="relative",
        )
        rows, recs = run_nmse(exp, keep_records=True)
        expected = np.mean([t.sq_rel_err_r for t in recs[0]])
        assert rows[0].nmse_r == pytest.approx(expected, rel=1e-12)

    def test_validation(self, cfg):
        with pytest.raises(ValueError):
            ExperimentConfig(base=cfg, trials=0)
        with pytest.raises(ValueError):
            ExperimentConfig(base=cfg, snr_db_list=())
        with pytest.raises(ValueError):
            ExperimentConfig(base=cfg, nmse_normalization="median")


class TestCsv:
    def test_header_only_for_empty_table(self, tmp_path):
        path = tmp_path / "empty.csv"
        export_csv([], path)
        assert path.read_text() == (
            "snr_db,n,k,epsilon,trials,seed,nmse_r,nmse_theta,mean_iters,conv_rate\n"
        )

    def test_round_trip_and_byte_stability(self, cfg, tmp_path):
        exp = ExperimentConfig(
            base=cfg, snr_db_list=(10.0,), epsilon_list=(0.55,), trials=5,
            master_seed=9,
        )
        rows = run_nmse(exp)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        export_csv(rows, p1)
        export_csv(rows, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_csv(p1) == rows

    def test_write_failure_names_path(self, tmp_path):
        bad = tmp_path / "missing-dir" / "out.csv"
        with pytest.raises(OSError, match="out.csv"):
            export_csv([], bad)
