"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with ``pytest tests/test_acceptance.py -v -s``.

The desk-scale sweeps are checked against frozen reference magnitudes
(REFERENCE_* below) at one order of magnitude, plus trend checks; the
remaining criteria are exact or oracle-backed.
"""

import math
import time

import numpy as np
import pytest

from risloc import (
    ExperimentConfig,
    PhaseConfig,
    SystemConfig,
    UePosition,
    build_dictionary,
    build_grid,
    coarse_estimate,
    effective_channel,
    exact_channel,
    fresnel_channel,
    model_derivatives,
    model_vector,
    near_field_bounds,
    objective,
    objective_derivatives,
    optimal_phase,
    refine,
    run_nmse,
    sample_ue,
    snr_channel_term,
    verify_optimality,
)
from risloc.cli import main as cli_main
from risloc.experiments import THETA_SECTOR
from risloc.signaling import Observation

REFERENCE_NMSE_R_10DB = 2.21e-5
REFERENCE_NMSE_THETA_10DB = 1.21e-7


def _report(name: str, detail: str):
    print(f"[PASS] {name}: {detail}")


class TestAcceptance:
    def test_cophasing_optimality(self):
        start = time.monotonic()
        rng = np.random.default_rng(0)
        shapes = [(2, 2), (2, 4), (4, 4)]  # N in {4, 8, 16}
        ks = [1, 2, 4]
        worst_rel_margin = math.inf
        worst_const_dev = 0.0
        for g in range(100):
            n_y, n_z = shapes[g % 3]
            k = ks[(g // 3) % 3]
            cfg = SystemConfig(n_y=n_y, n_z=n_z, k_ue=k)
            fresnel, rayleigh = near_field_bounds(cfg)
            pos = UePosition(
                rng.uniform(fresnel, rayleigh), rng.uniform(-1.4, 1.4)
            )
            a = exact_channel(cfg, pos)
            report = verify_optimality(a, trials=10_000, rng_seed=int(rng.integers(2**31)))
            rel_margin = report.margin / report.optimum
            worst_rel_margin = min(worst_rel_margin, rel_margin)
            assert report.margin >= -1e-9 * report.optimum
            const = snr_channel_term(a, PhaseConfig(np.full(cfg.n, rng.uniform(0, 2 * np.pi))))
            dev = abs(const - report.optimum) / report.optimum
            worst_const_dev = max(worst_const_dev, dev)
            assert dev <= 1e-12
        elapsed = time.monotonic() - start
        assert elapsed < 60.0
        _report(
            "co-phasing optimality",
            f"100 geometries x 10^4 competitors, worst relative margin "
            f"{worst_rel_margin:.3e}, constant-phase deviation {worst_const_dev:.2e}, "
            f"{elapsed:.1f}s",
        )

    def test_derivative_oracles(self):
        start = time.monotonic()
        cfg = SystemConfig()
        rng = np.random.default_rng(1)
        fresnel, rayleigh = near_field_bounds(cfg)
        worst_first = 0.0
        worst_second = 0.0
        for _ in range(100):
            r = rng.uniform(fresnel, rayleigh)
            th = rng.uniform(-1.4, 1.4)

            dz_dr, d2z_dr2, dz_dt, d2z_dt2 = model_derivatives(cfg, r, th)
            h = 1e-5 * r
            fd = (model_vector(cfg, r + h, th) - model_vector(cfg, r - h, th)) / (2 * h)
            e1 = np.linalg.norm(dz_dr - fd) / np.linalg.norm(fd)
            fd2 = (
                model_vector(cfg, r + h, th)
                - 2 * model_vector(cfg, r, th)
                + model_vector(cfg, r - h, th)
            ) / h**2
            e2 = np.linalg.norm(d2z_dr2 - fd2) / np.linalg.norm(fd2)
            ht = 1e-6
            fd = (model_vector(cfg, r, th + ht) - model_vector(cfg, r, th - ht)) / (2 * ht)
            e3 = np.linalg.norm(dz_dt - fd) / np.linalg.norm(fd)
            ht2 = 1e-4
            fd2 = (
                model_vector(cfg, r, th + ht2)
                - 2 * model_vector(cfg, r, th)
                + model_vector(cfg, r, th - ht2)
            ) / ht2**2
            e4 = np.linalg.norm(d2z_dt2 - fd2) / np.linalg.norm(fd2)

            # objective derivatives against a generic noisy observation
            y = model_vector(cfg, r, th) + 2.0 * (
                rng.standard_normal(cfg.k_ue**2) + 1j * rng.standard_normal(cfg.k_ue**2)
            )
            obs = Observation(y, 10.0, 0.1)
            re, te = r * 1.02, th + 0.015
            b_r, b_rr, b_t, b_tt = objective_derivatives(obs, cfg, re, te)
            hb = 1e-5 * re
            fd_r = (objective(obs, cfg, re + hb, te) - objective(obs, cfg, re - hb, te)) / (2 * hb)
            fd_rr = (
                objective(obs, cfg, re + hb, te)
                - 2 * objective(obs, cfg, re, te)
                + objective(obs, cfg, re - hb, te)
            ) / hb**2
            hbt = 1e-6
            fd_t = (objective(obs, cfg, re, te + hbt) - objective(obs, cfg, re, te - hbt)) / (2 * hbt)
            hbt2 = 1e-4
            fd_tt = (
                objective(obs, cfg, re, te + hbt2)
                - 2 * objective(obs, cfg, re, te)
                + objective(obs, cfg, re, te - hbt2)
            ) / hbt2**2
            e5 = abs(b_r - fd_r) / max(abs(fd_r), abs(b_r))
            e6 = abs(b_rr - fd_rr) / max(abs(fd_rr), abs(b_rr))
            e7 = abs(b_t - fd_t) / max(abs(fd_t), abs(b_t))
            e8 = abs(b_tt - fd_tt) / max(abs(fd_tt), abs(b_tt))

            worst_first = max(worst_first, e1, e3, e5, e7)
            worst_second = max(worst_second, e2, e4, e6, e8)
            assert max(e1, e3, e5, e7) < 1e-4
            assert max(e2, e4, e6, e8) < 1e-3
        elapsed = time.monotonic() - start
        assert elapsed < 60.0
        _report(
            "derivative oracles",
            f"100 points, worst first-order rel err {worst_first:.2e}, "
            f"worst second-order {worst_second:.2e}, {elapsed:.1f}s",
        )

    def test_fresnel_consistency(self):
        cfg = SystemConfig()
        rng = np.random.default_rng(2)
        fresnel, rayleigh = near_field_bounds(cfg)
        worst = 0.0
        for _ in range(100):
            pos = UePosition(rng.uniform(fresnel, rayleigh), rng.uniform(-1.5, 1.5))
            z = model_vector(cfg, pos.r, pos.theta)
            gram = effective_channel(fresnel_channel(cfg, pos)).flatten(order="F")
            worst = max(worst, float(np.max(np.abs(z - gram))))
            assert worst < 1e-9
        _report("fresnel consistency", f"100 points, worst entry deviation {worst:.2e}")

    def test_noiseless_on_grid_recovery(self):
        cfg = SystemConfig()  # N=64, K=8
        grid = build_grid(cfg, 0.55)
        dictionary = build_dictionary(cfg, grid, "fresnel")
        rng = np.random.default_rng(3)
        hits = 0
        for m in rng.choice(grid.m, size=100, replace=True):
            pos = UePosition(float(grid.r[m]), float(grid.theta[m]))
            obs = Observation(model_vector(cfg, pos.r, pos.theta), math.inf, 0.0)
            hits += coarse_estimate(obs, dictionary).index == m + 1
        assert hits == 100
        _report("on-grid coarse recovery", f"{hits}/100 exact indices (M={grid.m})")

    def test_noiseless_end_to_end(self):
        cfg = SystemConfig()  # N=64, K=8, gamma=0.5, tau=1e-4 defaults
        dictionary = build_dictionary(cfg, build_grid(cfg, 0.55), "fresnel")
        rng = np.random.default_rng(4)
        good = 0
        for _ in range(200):
            pos = sample_ue(cfg, rng)
            obs = Observation(model_vector(cfg, pos.r, pos.theta), math.inf, 0.0)
            ce = coarse_estimate(obs, dictionary)
            res = refine(obs, cfg, (ce.r, ce.theta))
            good += (
                abs(res.r_hat - pos.r) < 1e-3 and abs(res.theta_hat - pos.theta) < 1e-4
            )
        assert good >= 0.95 * 200
        _report("noiseless end-to-end", f"{good}/200 within 1e-3 m / 1e-4 rad")

    def test_nmse_vs_snr_desk_scale(self):
        start = time.monotonic()
        exp = ExperimentConfig(
            base=SystemConfig(),
            snr_db_list=(0.0, 10.0, 20.0, 30.0),
            epsilon_list=(0.55,),
            trials=500,
            master_seed=0,
        )
        rows = run_nmse(exp)
        by_snr = {row.snr_db: row for row in rows}
        at10 = by_snr[10.0]
        assert REFERENCE_NMSE_R_10DB / 10 <= at10.nmse_r <= REFERENCE_NMSE_R_10DB * 10
        assert (
            REFERENCE_NMSE_THETA_10DB / 10
            <= at10.nmse_theta
            <= REFERENCE_NMSE_THETA_10DB * 10
        )
        r_curve = [by_snr[s].nmse_r for s in (0.0, 10.0, 20.0, 30.0)]
        t_curve = [by_snr[s].nmse_theta for s in (0.0, 10.0, 20.0, 30.0)]
        assert all(b <= a for a, b in zip(r_curve, r_curve[1:]))
        assert all(b <= a for a, b in zip(t_curve, t_curve[1:]))
        elapsed = time.monotonic() - start
        assert elapsed < 300.0
        _report(
            "nmse-vs-snr desk sweep",
            f"10 dB nmse_r={at10.nmse_r:.3e} (ref {REFERENCE_NMSE_R_10DB:.2e}), "
            f"nmse_theta={at10.nmse_theta:.3e} (ref {REFERENCE_NMSE_THETA_10DB:.2e}), "
            f"both curves nonincreasing, {elapsed:.1f}s",
        )

    def test_resolution_sweep_desk_scale(self):
        start = time.monotonic()
        exp = ExperimentConfig(
            base=SystemConfig(),
            snr_db_list=(10.0,),
            n_list=(100,),
            k_list=(12,),
            epsilon_list=(0.15, 0.5, 1.25),
            trials=200,
            master_seed=0,
        )
        rows = run_nmse(exp)
        iters = [row.mean_iters for row in rows]
        assert iters[0] < iters[1] < iters[2]
        nmse_r = [row.nmse_r for row in rows]
        nmse_t = [row.nmse_theta for row in rows]
        ratio_r = max(nmse_r) / min(nmse_r)
        ratio_t = max(nmse_t) / min(nmse_t)
        assert ratio_r < 3.0
        assert ratio_t < 3.0
        elapsed = time.monotonic() - start
        assert elapsed < 300.0
        _report(
            "resolution desk sweep",
            f"mean iterations {iters[0]:.1f} < {iters[1]:.1f} < {iters[2]:.1f}, "
            f"NMSE max/min ratios r={ratio_r:.2f}, theta={ratio_t:.2f}, {elapsed:.1f}s",
        )

    def test_sweep_determinism_across_workers(self, tmp_path):
        cfg_file = tmp_path / "det.cfg"
        cfg_file.write_text(
            "lambda = 0.1\nn_y = 8\nn_z = 8\nk_ue = 8\n"
            "snr_db_list = 10\nepsilon_list = 0.55\ntrials = 30\nmaster_seed = 0\n"
        )
        outputs = []
        for workers in (1, 2, 3):
            out = tmp_path / f"w{workers}.csv"
            code = cli_main([
                "nmse-sweep", str(cfg_file), "--set", f"workers={workers}",
                "-o", str(out),
            ])
            assert code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
        _report(
            "sweep determinism",
            f"byte-identical CSV over worker counts 1/2/3 ({len(outputs[0])} bytes)",
        )
