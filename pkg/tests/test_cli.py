"""Tests for the unplab command line: presets, exit codes, reports and the run ledger."""

import json

import pytest

from src.cli import ConfigError, load_experiment_config
from src.cli.config import PRESETS, ExperimentConfig
from src.database import RunRepository
from src.main import main


def write_config(tmp_path, data, name="experiment.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def run_json(capsys, args):
    code = main(args)
    return code, json.loads(capsys.readouterr().out)


class TestExperimentConfig:
    """Merging presets, config files and flags."""

    def test_preset_parameters(self):
        config = load_experiment_config("design", preset="raz-design")
        assert config.params == {"t": 4, "m": 8}
        assert config.seed == 0
        assert config.fmt == "json"

    def test_file_overrides_preset(self, tmp_path):
        path = write_config(tmp_path, {"m": 4, "seed": 9})
        config = load_experiment_config("design", path, "raz-design")
        assert config.params == {"t": 4, "m": 4}
        assert config.seed == 9

    def test_flags_override_file(self, tmp_path):
        path = write_config(tmp_path, {"seed": 9, "format": "csv"})
        config = load_experiment_config("design", path, seed=3, fmt="json")
        assert config.seed == 3
        assert config.fmt == "json"

    def test_preset_for_other_subcommand(self):
        with pytest.raises(ConfigError):
            load_experiment_config("entropy", preset="superdense")

    def test_config_must_be_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_experiment_config("design", path)

    def test_seed_range(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("design", seed=-1)
        with pytest.raises(ConfigError):
            ExperimentConfig("design", seed=1 << 64)

    def test_digest_ignores_output_path(self, tmp_path):
        a = ExperimentConfig("design", {"t": 2}, output=tmp_path / "a.json")
        b = ExperimentConfig("design", {"t": 2}, output=tmp_path / "b.json")
        assert a.digest == b.digest
        assert a.digest != ExperimentConfig("design", {"t": 3}).digest

    def test_protocol_presets_registered(self):
        assert PRESETS["markov-break"] == ("ocl-sim", {"preset": "markov-break"})


class TestExitCodes:
    """0 pass, 1 violation, 2 hypothesis unmet, 64 usage."""

    def test_design_preset_passes(self, capsys):
        code, report = run_json(capsys, ["design", "--preset", "raz-design"])
        assert code == 0
        assert report["expected_d"] == 120
        assert report["design"]["d"] == 120
        assert report["verdict"] == "pass"

    def test_helstrom_entropy(self, capsys):
        code, report = run_json(capsys, ["entropy", "--preset", "helstrom"])
        assert code == 0
        assert report["guessing_probability"] == pytest.approx(0.75)
        assert report["conditional_distance"] == pytest.approx(0.5)

    def test_superdense_chain_is_tight(self, capsys):
        code, report = run_json(capsys, ["chain", "--preset", "superdense"])
        assert code == 0
        assert report["scenario"] == "superdense"
        assert report["degradation"]["slack"] == pytest.approx(0.0, abs=1e-7)

    def test_copy_attack_is_rejected(self, capsys):
        code, report = run_json(capsys, ["chain", "--preset", "cnot-attack"])
        assert code == 0
        assert report["rejected"]
        assert report["validation"]["valid"] is False

    def test_unmet_hypothesis_exit_code(self, capsys):
        code, report = run_json(capsys, ["ocl-sim", "--preset", "alternating-2round"])
        assert code == 2
        assert report["verdict"] == "hypothesis unmet"
        assert report["checks"]["markov"]["holds"]

    def test_met_hypothesis_passes(self, capsys):
        code, report = run_json(capsys, ["ocl-sim", "--preset", "fresh-extract"])
        assert code == 0
        assert report["verdict"] == "pass"
        assert all(c["hypothesis_met"] for c in report["checks"]["extraction"])

    def test_markov_violation_exit_code(self, capsys):
        code, report = run_json(capsys, ["ocl-sim", "--preset", "markov-break"])
        assert code == 1
        assert report["checks"]["markov"]["first_violation"] == 1

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 64

    def test_unknown_preset(self):
        assert main(["design", "--preset", "nope"]) == 64

    def test_preset_for_other_subcommand(self):
        assert main(["entropy", "--preset", "superdense"]) == 64

    def test_non_positive_tolerance(self):
        assert main(["design", "--tolerance", "0"]) == 64

    def test_bad_protocol_config(self, tmp_path):
        path = write_config(tmp_path, {"rounds": -1})
        assert main(["ocl-sim", "--config", str(path)]) == 64

    def test_bad_reconstruction_grid(self, tmp_path):
        path = write_config(tmp_path, {"ns": [2], "epsilons": [0.7]})
        assert main(["reconstruct", "--config", str(path)]) == 64


class TestReports:
    """Output formats and determinism."""

    def test_identical_configs_identical_bytes(self, tmp_path):
        first, second = tmp_path / "one.json", tmp_path / "two.json"
        code = main(["ocl-sim", "--preset", "fresh-3round", "--seed", "7", "--out", str(first)])
        assert main(["ocl-sim", "--preset", "fresh-3round", "--seed", "7", "--out", str(second)]) == code
        assert first.read_bytes() == second.read_bytes()

    def test_reconstruction_csv(self, tmp_path):
        config = write_config(tmp_path, {"ns": [2], "epsilons": [0.5]})
        out = tmp_path / "grid.csv"
        assert main(["reconstruct", "--config", str(config), "--format", "csv", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "n,epsilon,x,success,bound,gate_count,meets_bound"
        assert len(lines) == 1 + 4
        assert all(line.endswith(",true") for line in lines[1:])

    def test_design_csv_on_stdout(self, capsys):
        assert main(["design", "--preset", "raz-design", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "index,set,overlap_sum"
        assert len(lines) == 1 + 8

    def test_flattened_csv_for_scalar_reports(self, capsys):
        assert main(["entropy", "--preset", "helstrom", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "field,value"
        assert any(line.startswith("certificate.gap,") for line in lines)

    def test_protocol_csv_has_one_row_per_round(self, capsys):
        assert main(["ocl-sim", "--preset", "alternating-4round", "--format", "csv"]) == 2
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("round,active,")
        assert len(lines) == 1 + 4


class TestLedger:
    """Runs recorded in the SQLite ledger."""

    def test_run_recorded(self, tmp_path, capsys):
        db = tmp_path / "runs.db"
        assert main(["design", "--preset", "raz-design", "--seed", "4", "--ledger", str(db)]) == 0
        repo = RunRepository(str(db))
        runs = repo.list_runs()
        repo.close()
        assert len(runs) == 1
        run = runs[0]
        assert run.subcommand == "design"
        assert run.preset == "raz-design"
        assert run.seed == 4
        assert run.exit_code == 0
        assert run.summary == {"verdict": "pass"}

    def test_failed_run_recorded_without_summary(self, tmp_path):
        db = tmp_path / "runs.db"
        config = write_config(tmp_path, {"rounds": -1})
        assert main(["ocl-sim", "--config", str(config), "--ledger", str(db)]) == 64
        repo = RunRepository(str(db))
        runs = repo.list_runs("ocl-sim")
        repo.close()
        assert [r.exit_code for r in runs] == [64]
        assert runs[0].summary == {}

    def test_no_ledger_by_default(self, isolated_home, capsys):
        assert main(["design", "--preset", "raz-design"]) == 0
        assert not list(isolated_home.rglob("*.db"))
