import json
import math

import pytest

from itgap.cli import main
from itgap.config import (
    ConfigError,
    fermi_hubbard_benchmark_config,
    tfim_benchmark_config,
    validate_config,
)
from itgap.runner import cmd_run, reproduce_figure, reproduce_table, run_experiment


def small_tfim_config(**overrides):
    cfg = tfim_benchmark_config()
    cfg["tau_grid"] = {"min": 0.0, "max": 12.0, "count": 61}
    cfg["windows"] = {"energy_sum": [4.0, 10.0], "second_gap": [2.0, 6.0]}
    cfg.update(overrides)
    return validate_config(cfg)


class TestConfigValidation:
    def test_unknown_key_rejected(self):
        cfg = tfim_benchmark_config()
        cfg["unknown_knob"] = 1
        with pytest.raises(ConfigError):
            validate_config(cfg)

    def test_missing_required_key_rejected(self):
        cfg = tfim_benchmark_config()
        del cfg["seed"]
        with pytest.raises(ConfigError):
            validate_config(cfg)

    def test_wrong_model_params_rejected(self):
        cfg = tfim_benchmark_config()
        cfg["model_params"] = {"hopping": 1.0}
        with pytest.raises(ConfigError):
            validate_config(cfg)

    def test_defaults_filled(self):
        cfg = validate_config({
            "schema_version": 1,
            "model": "tfim",
            "sites": 2,
            "model_params": {"coupling": 1.0, "field": 0.5},
            "seed": 0,
            "m_list": [1],
            "tau_grid": {"min": 0.0, "max": 5.0, "count": 11},
            "backend": "exact",
        })
        assert cfg["tau_selection"] == "min_slope"
        assert cfg["windows"]["energy_sum"] == [1.0, 8.0]


class TestCmdRun:
    def test_outputs_written(self, tmp_path):
        cfg = small_tfim_config()
        result = cmd_run(cfg, tmp_path)
        csv_path = tmp_path / cfg["output"]["trajectory_csv"]
        json_path = tmp_path / cfg["output"]["estimates_json"]
        assert csv_path.exists() and json_path.exists()
        payload = json.loads(json_path.read_text())
        assert payload["provenance"]["seed"] == cfg["seed"]
        for m in ("1", "2"):
            assert "gap" in payload["estimates"][m]
            assert "relative_error" in payload["estimates"][m]["energy_sum"]
        header = csv_path.read_text().splitlines()[0]
        assert header.split(",") == [
            "tau", "M", "expectation_log_magnitude", "expectation_phase_real",
            "expectation_phase_imag", "ratio_real", "ratio_imag", "epsilon_vs_exact",
        ]
        assert result["support"]["all_ok"]

    def test_byte_identical_reruns(self, tmp_path):
        cfg = small_tfim_config()
        cmd_run(cfg, tmp_path / "a")
        cmd_run(cfg, tmp_path / "b")
        for name in cfg["output"].values():
            assert (tmp_path / "a" / name).read_bytes() == (
                tmp_path / "b" / name
            ).read_bytes()

    def test_backends_cross_check(self):
        cfg = small_tfim_config(sites=3)
        cfg["tau_grid"] = {"min": 0.0, "max": 8.0, "count": 33}
        cfg["windows"] = {"energy_sum": [3.0, 7.0], "second_gap": [1.0, 5.0]}
        exact = run_experiment(validate_config(cfg))
        cfg["backend"] = "stepped"
        stepped = run_experiment(validate_config(cfg))
        for m in ("1", "2"):
            a = exact["estimates"][m]["gap"]["value"]
            b = stepped["estimates"][m]["gap"]["value"]
            assert abs(a - b) / a < 1e-6
            a = exact["estimates"][m]["energy_sum"]["value"]
            b = stepped["estimates"][m]["energy_sum"]["value"]
            assert abs(a - b) / abs(a) < 1e-6


class TestCliEntry:
    def test_run_exit_codes(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(small_tfim_config()))
        assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "out")]) == 0

    def test_invalid_config_exit_1(self, tmp_path):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text(json.dumps({"schema_version": 1}))
        assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path)]) == 1

    def test_seed_override(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(small_tfim_config()))
        out = tmp_path / "out"
        assert main(["run", "--config", str(cfg_path), "--out", str(out),
                     "--seed", "7"]) == 0
        payload = json.loads((out / "tfim_estimates.json").read_text())
        assert payload["provenance"]["seed"] == 7

    def test_selftest_passes(self):
        assert main(["selftest"]) == 0


class TestReproductions:
    def test_table(self, tmp_path):
        panels = reproduce_table(tmp_path)
        assert (tmp_path / "table.csv").exists()
        assert (tmp_path / "table.json").exists()
        tfim = panels["tfim"]
        assert tfim["energy_sum"]["exact"] == pytest.approx(-10.05, abs=5e-3)
        assert tfim["energy_sum"]["relative_error"] < 1e-5
        assert tfim["second_gap"]["relative_error"] < 0.10
        fh = panels["fermi_hubbard"]
        assert fh["energy_sum"]["exact"] == pytest.approx(-5.633, abs=5e-4)
        assert fh["energy_sum"]["relative_error"] < 1e-3
        assert fh["second_gap"]["relative_error"] < 0.10

    def test_figure(self, tmp_path):
        slopes = reproduce_figure(tmp_path, plot=True)
        for name in ("tfim", "fermi_hubbard"):
            assert (tmp_path / f"{name}_figure.csv").exists()
            lines = (tmp_path / f"{name}_figure.csv").read_text().splitlines()
            assert lines[0] == "tau,epsilon_m1,epsilon_m2"
            assert len(lines) == 202
        assert (tmp_path / "relative_error.png").exists()
        info = slopes["tfim"]
        # pre-breakdown error decay rate tracks the oracle second gap
        rate = info["m1"]["epsilon_decay_rate"]
        assert rate == pytest.approx(info["oracle_second_gap"], rel=0.10)

    def test_fh_benchmark_preconditions(self):
        result = run_experiment(fermi_hubbard_benchmark_config())
        assert result["support"]["all_ok"]
        assert result["exact"]["energy_sum"] == pytest.approx(-5.633, abs=5e-4)
        assert abs(result["exact"]["second_gap"]) == pytest.approx(0.8363, abs=5e-4)
