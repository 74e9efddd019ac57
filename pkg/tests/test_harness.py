import os

import numpy as np
import pytest
from click.testing import CliRunner

from impedance_lab.cli import main
from impedance_lab.exceptions import ConfigError
from impedance_lab.harness import (ExperimentConfig, capacity_csv, load_config,
                                   run_capacity, run_sweep, sweep_csv,
                                   worker_count)

SMALL = dict(scenario="iid", N=2, L=3, T=16, snr_grid_db=(10.0,), trials=20,
             seed=5, estimators=("mm",))


class TestConfig:
    def test_defaults_valid(self):
        ExperimentConfig().validate()

    def test_bad_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            ExperimentConfig(scenario="warp").validate()

    def test_bad_estimator(self):
        with pytest.raises(ConfigError, match="estimators"):
            ExperimentConfig(estimators=("ml", "nope")).validate()

    def test_bad_trials(self):
        with pytest.raises(ConfigError, match="trials"):
            ExperimentConfig(trials=0).validate()

    def test_load_round_trip(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[experiment]\n"
                     "scenario = moderate\nN = 4\nL = 5\nT = 64\n"
                     "Z_A = 73+42.5j\nsnr_grid_db = 0, 10, 20\n"
                     "estimators = ml, mm\ntrials = 7\nseed = 3\n")
        cfg = load_config(str(p))
        assert cfg.scenario == "moderate"
        assert cfg.N == 4
        assert cfg.Z_A == 73 + 42.5j
        assert cfg.snr_grid_db == (0.0, 10.0, 20.0)
        assert cfg.estimators == ("ml", "mm")
        assert cfg.trials == 7

    def test_unknown_field_named(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[experiment]\nbogus = 1\n")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(str(p))

    def test_unparseable_field_named(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[experiment]\ntrials = many\n")
        with pytest.raises(ConfigError, match="trials"):
            load_config(str(p))

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("/nonexistent/exp.ini")

    def test_missing_section(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[other]\nN = 4\n")
        with pytest.raises(ConfigError, match="experiment"):
            load_config(str(p))


class TestRunSweep:
    def test_noiseless_trial_exact(self):
        cfg = ExperimentConfig(scenario="iid", N=2, L=3, T=16,
                               snr_grid_db=(float("inf"),), trials=1, seed=1,
                               estimators=("mm",))
        rows = run_sweep(cfg)
        # exact up to the roundoff of the training Gram matrix
        assert rows[0].rmse_F_rel < 1e-12

    def test_accounting(self):
        rows = run_sweep(ExperimentConfig(**SMALL))
        for r in rows:
            assert r.trials_ok + r.trials_degenerate == r.trials

    def test_determinism_across_workers(self):
        cfg = ExperimentConfig(**SMALL)
        csv1 = sweep_csv(run_sweep(cfg))
        os.environ["IMPEDANCE_LAB_THREADS"] = "1"
        try:
            csv2 = sweep_csv(run_sweep(cfg))
        finally:
            del os.environ["IMPEDANCE_LAB_THREADS"]
        assert csv1 == csv2

    def test_seed_changes_output(self):
        a = sweep_csv(run_sweep(ExperimentConfig(**SMALL)))
        b = sweep_csv(run_sweep(ExperimentConfig(**{**SMALL, "seed": 6})))
        assert a != b

    def test_csv_schema(self):
        text = sweep_csv(run_sweep(ExperimentConfig(**SMALL)))
        lines = text.strip().split("\n")
        assert lines[0] == "schema=1"
        assert lines[1].startswith("scenario,estimator,")
        assert len(lines) == 3

    def test_worker_count_env(self):
        os.environ["IMPEDANCE_LAB_THREADS"] = "3"
        try:
            assert worker_count() == 3
        finally:
            del os.environ["IMPEDANCE_LAB_THREADS"]

    def test_capacity_requires_loss(self):
        with pytest.raises(ConfigError, match="loss_db"):
            run_capacity(ExperimentConfig(**SMALL))

    def test_capacity_csv(self):
        cfg = ExperimentConfig(scenario="iid", N=2, L=3, T=16,
                               snr_grid_db=(0.0,), trials=10, seed=2,
                               estimators=("mm",), loss_db=3.0)
        pts = run_capacity(cfg)
        text = capacity_csv(cfg, pts)
        lines = text.strip().split("\n")
        assert lines[0] == "schema=1"
        assert len(lines) == 3


class TestCli:
    def test_validate_passes(self):
        result = CliRunner().invoke(main, ["validate"])
        assert result.exit_code == 0
        assert result.output.count("[PASS]") == 5

    def test_missing_config_exit_2(self):
        result = CliRunner().invoke(main, ["sweep", "--config", "/no/such.ini"])
        assert result.exit_code == 2
        assert "not found" in result.output

    def test_bad_field_exit_2(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[experiment]\ntrials = -3\n")
        result = CliRunner().invoke(main, ["sweep", "--config", str(p)])
        assert result.exit_code == 2
        assert "trials" in result.output

    def test_sweep_writes_csv(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[experiment]\nscenario = iid\nN = 2\nL = 3\nT = 16\n"
                     "snr_grid_db = 10\ntrials = 10\nestimators = mm\n")
        out = tmp_path / "out.csv"
        result = CliRunner().invoke(
            main, ["sweep", "--config", str(p), "--output", str(out)])
        assert result.exit_code == 0
        assert out.read_text().startswith("schema=1\n")

    def test_low_snr_degenerates_reported(self, tmp_path):
        p = tmp_path / "exp.ini"
        p.write_text("[experiment]\nscenario = iid\nN = 1\nL = 1\nT = 4\n"
                     "snr_grid_db = -40\ntrials = 10\nestimators = ml1\n")
        out = tmp_path / "out.csv"
        result = CliRunner().invoke(
            main, ["sweep", "--config", str(p), "--output", str(out),
                   "--seed", "1"])
        assert result.exit_code in (0, 3)
        assert "degenerate" in result.output

    def test_estimate_from_stats_file(self, tmp_path):
        from impedance_lab.fading import ChannelSpec
        from impedance_lab.frontend import compute_F
        from impedance_lab.signalpath import (dft_training, sufficient_stats,
                                              synthesize)
        F = compute_F(73 + 42.5j, 50 + 0j, 60 + 20j)
        spec = ChannelSpec.iid(N=4, L=5, sigma_h2=1.0)
        train = dft_training(4, 64)
        obs = synthesize(spec, train, F, 0.0, np.random.default_rng(0))
        stats = sufficient_stats(obs, train, 0.0)
        path = tmp_path / "stats.npz"
        np.savez(path, Y1=stats.Y1, Y2=stats.Y2, sigma2=stats.sigma2)
        result = CliRunner().invoke(
            main, ["estimate", "--stats", str(path), "--method", "mm",
                   "--z1", "50", "--z2", "60+20j"])
        assert result.exit_code == 0
        assert '"Z_A_hat"' in result.output

    def test_estimate_missing_array(self, tmp_path):
        path = tmp_path / "stats.npz"
        np.savez(path, Y1=np.zeros((2, 2)))
        result = CliRunner().invoke(main, ["estimate", "--stats", str(path)])
        assert result.exit_code == 2
