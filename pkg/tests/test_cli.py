"""Command-line interface: exit codes, output formats, and config handling."""

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from randsteps.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_NUMERIC, EXIT_PASS, main
from randsteps.montecarlo import ExperimentSpec, estimate
from randsteps.predictors import CurvaturePath, kappa_cosine_product, kappa_norm_product


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_field_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["field", "value"]
    return dict(rows[1:])


def parse_row_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [dict(zip(rows[0], r)) for r in rows[1:]]


class TestPredict:
    def test_sphere_degrees(self, capsys):
        code, out, _ = run_cli(
            capsys, "predict", "--geometry", "sphere", "--n-dim", "3",
            "--angles", "60,60", "--angle-unit", "degrees", "--output", "csv",
        )
        assert code == EXIT_PASS
        fields = parse_field_csv(out)
        assert float(fields["mean"]) == pytest.approx(0.25, rel=1e-12)

    def test_flat_reports_expected_norm(self, capsys):
        code, out, _ = run_cli(
            capsys, "predict", "--geometry", "flat", "--steps", "3,4", "--output", "csv",
        )
        assert code == EXIT_PASS
        fields = parse_field_csv(out)
        assert float(fields["mean"]) == 25.0
        assert float(fields["expected_norm"]) == 5.0

    def test_dimension_free_prediction_has_no_sigma(self, capsys):
        code, out, _ = run_cli(
            capsys, "predict", "--geometry", "hyperbolic", "--arcs", "1,1",
            "--output", "json",
        )
        assert code == EXIT_PASS
        payload = json.loads(out)
        assert payload["mean"] == pytest.approx(math.cosh(1.0) ** 2, rel=1e-12)
        assert payload["sigma_exact"] is None

    def test_with_dimension_reports_sigma(self, capsys):
        code, out, _ = run_cli(
            capsys, "predict", "--geometry", "sphere", "--n-dim", "101",
            "--angles", "1.5707963267948966,1.5707963267948966", "--output", "json",
        )
        assert code == EXIT_PASS
        payload = json.loads(out)
        assert payload["mean"] == 0.0
        assert payload["sigma_exact"] == pytest.approx(0.1, rel=1e-12)

    def test_kappa_products(self, capsys, tmp_path):
        path_file = tmp_path / "path.txt"
        path_file.write_text("1.0 0.0 0.0 2.0\n0.5 1.0 1.0 1.0\n")
        code, out, _ = run_cli(
            capsys, "predict", "--geometry", "kappa",
            "--curvature-file", str(path_file), "--output", "json",
        )
        assert code == EXIT_PASS
        payload = json.loads(out)
        want = CurvaturePath([(1.0, (0.0, 0.0, 2.0)), (0.5, (1.0, 1.0, 1.0))])
        assert payload["norm_product"] == pytest.approx(kappa_norm_product(want), rel=1e-14)
        assert payload["cosine_product"] == pytest.approx(kappa_cosine_product(want), rel=1e-14)

    def test_kappa_rejects_simulate(self, capsys, tmp_path):
        path_file = tmp_path / "path.txt"
        path_file.write_text("1.0 0.0\n")
        code, _, err = run_cli(
            capsys, "simulate", "--geometry", "kappa",
            "--curvature-file", str(path_file), "--trials", "10", "--seed", "1",
        )
        assert code == EXIT_CONFIG
        assert "config error" in err

    def test_precision_loss_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys, "predict", "--geometry", "hyperbolic", "--n-dim", "3",
            "--arcs", "1e-9,1e-9",
        )
        assert code == EXIT_NUMERIC
        assert "numeric failure" in err

    def test_missing_schedule_is_config_error(self, capsys):
        code, _, err = run_cli(capsys, "predict", "--geometry", "sphere", "--n-dim", "5")
        assert code == EXIT_CONFIG
        assert "angles" in err


class TestSimulate:
    def test_csv_row_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--geometry", "flat", "--n-dim", "10",
            "--steps", "1,1", "--trials", "2000", "--seed", "7", "--output", "csv",
        )
        assert code == EXIT_PASS
        header, rows = parse_row_csv(out)
        assert header == [
            "experiment", "geometry", "n_dim", "schedule", "trials", "seed",
            "prediction_mean", "sigma_exact", "sigma_bound", "mc_mean", "mc_std",
            "std_error", "z_mean", "std_ratio", "verdict",
        ]
        assert len(rows) == 1
        row = rows[0]
        assert row["experiment"] == "simulate"
        assert row["schedule"] == "1;1"
        assert int(row["trials"]) == 2000

    def test_csv_roundtrip_reproduces_estimate(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--geometry", "flat", "--n-dim", "10",
            "--steps", "1,0.5", "--trials", "2000", "--seed", "21", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        row = rows[0]
        schedule = tuple(float(v) for v in row["schedule"].split(";"))
        spec = ExperimentSpec(
            row["geometry"], int(row["n_dim"]), schedule, int(row["trials"]),
            int(row["seed"]),
        )
        est = estimate(spec)
        # %.17g output round-trips doubles exactly
        assert float(row["mc_mean"]) == est.mean
        assert float(row["mc_std"]) == est.sample_std

    def test_generated_seed_noted_on_stderr(self, capsys):
        code, out, err = run_cli(
            capsys, "simulate", "--geometry", "flat", "--n-dim", "5",
            "--steps", "1", "--trials", "10", "--output", "csv",
        )
        assert code == EXIT_PASS
        assert "generated seed:" in err
        _, rows = parse_row_csv(out)
        assert int(rows[0]["seed"]) >= 0

    def test_trials_required(self, capsys):
        code, _, err = run_cli(
            capsys, "simulate", "--geometry", "flat", "--n-dim", "5", "--steps", "1",
        )
        assert code == EXIT_CONFIG
        assert "trials" in err

    def test_single_trial_marked_in_json(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--geometry", "flat", "--n-dim", "5",
            "--steps", "1,1", "--trials", "1", "--seed", "3", "--output", "json",
        )
        assert code == EXIT_PASS
        payload = json.loads(out)
        assert payload[0]["insufficient_trials"] is True

    def test_operator_spectrum_flag(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--geometry", "operator", "--spectrum", "1,1,1,1,1,1",
            "--trials", "50", "--seed", "2", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert float(rows[0]["mc_mean"]) == 1.0
        assert float(rows[0]["mc_std"]) == 0.0


class TestCompare:
    def test_deterministic_pass(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--geometry", "sphere", "--n-dim", "12",
            "--angles", "1.0471975511965976", "--trials", "1000", "--seed", "5",
            "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert rows[0]["verdict"] == "pass"
        assert float(rows[0]["z_mean"]) == 0.0

    def test_expect_mean_override_fails(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--geometry", "sphere", "--n-dim", "12",
            "--angles", "1.0471975511965976", "--trials", "1000", "--seed", "5",
            "--expect-mean", "0.9", "--output", "csv",
        )
        assert code == EXIT_FAIL
        _, rows = parse_row_csv(out)
        assert rows[0]["verdict"] == "fail"

    def test_operator_spectrum_file(self, capsys, tmp_path):
        spec_file = tmp_path / "spectrum.txt"
        spec_file.write_text("".join(f"{(j + 1) / 60}\n" for j in range(60)))
        code, out, _ = run_cli(
            capsys, "compare", "--geometry", "operator", "--spectra-file",
            str(spec_file), "--observable", "norm_ratio", "--trials", "4000",
            "--seed", "11", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert rows[0]["verdict"] == "pass"
        assert rows[0]["geometry"] == "operator"

    def test_hyperbolic_with_std_gate(self, capsys):
        code, out, _ = run_cli(
            capsys, "compare", "--geometry", "hyperbolic", "--n-dim", "50",
            "--arcs", "0.5,0.5", "--trials", "20000", "--seed", "19",
            "--require-std", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert rows[0]["verdict"] == "pass"
        assert 0.9 <= float(rows[0]["std_ratio"]) <= 1.1


class TestConfigFile:
    def test_config_supplies_flags(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "geometry": "flat", "n_dim": 10, "steps": "1,1",
            "trials": 500, "seed": 7, "output": "csv",
        }))
        code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg))
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert rows[0]["geometry"] == "flat"
        assert int(rows[0]["seed"]) == 7

    def test_flags_override_config(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({
            "geometry": "flat", "n_dim": 10, "steps": "1,1",
            "trials": 500, "seed": 7,
        }))
        code, out, _ = run_cli(
            capsys, "simulate", "--config", str(cfg), "--seed", "8", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert int(rows[0]["seed"]) == 8

    def test_unknown_key_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text(json.dumps({"geometry": "flat", "stepz": "1,1"}))
        code, _, err = run_cli(capsys, "simulate", "--config", str(cfg))
        assert code == EXIT_CONFIG
        assert "stepz" in err

    def test_missing_config_file(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "simulate", "--config", str(tmp_path / "absent.json"),
        )
        assert code == EXIT_CONFIG


class TestTable:
    def test_sweep_n_dim(self, capsys):
        code, out, _ = run_cli(
            capsys, "table", "--geometry", "sphere", "--angles", "1.0471975511965976",
            "--sweep-n-dim", "5..8", "--trials", "200", "--seed", "9", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert [int(r["n_dim"]) for r in rows] == [5, 6, 7, 8]
        # deterministic single-step rows all pass with distinct derived seeds
        assert {r["verdict"] for r in rows} == {"pass"}
        assert [int(r["seed"]) for r in rows] == [9, 10, 11, 12]

    def test_sweep_m_repeats_schedule_head(self, capsys):
        code, out, _ = run_cli(
            capsys, "table", "--geometry", "flat", "--n-dim", "30", "--steps", "1",
            "--sweep-m", "1,2,3", "--trials", "3000", "--seed", "14", "--output", "csv",
        )
        assert code == EXIT_PASS
        _, rows = parse_row_csv(out)
        assert [r["schedule"] for r in rows] == ["1", "1;1", "1;1;1"]
        assert {r["verdict"] for r in rows} == {"pass"}

    def test_requires_exactly_one_axis(self, capsys):
        code, _, err = run_cli(
            capsys, "table", "--geometry", "flat", "--n-dim", "5", "--steps", "1",
            "--trials", "10", "--seed", "1",
        )
        assert code == EXIT_CONFIG
        code, _, err = run_cli(
            capsys, "table", "--geometry", "flat", "--n-dim", "5", "--steps", "1",
            "--sweep-n-dim", "5..6", "--sweep-m", "1..2", "--trials", "10", "--seed", "1",
        )
        assert code == EXIT_CONFIG

    def test_empty_sweep_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "table", "--geometry", "flat", "--n-dim", "5", "--steps", "1",
            "--sweep-m", "", "--trials", "10", "--seed", "1",
        )
        assert code == EXIT_CONFIG

    def test_operator_sweep_m_rejected(self, capsys):
        code, _, err = run_cli(
            capsys, "table", "--geometry", "operator", "--spectrum", "1,2",
            "--sweep-m", "1..2", "--trials", "10", "--seed", "1",
        )
        assert code == EXIT_CONFIG
        assert "operator_product" in err


class TestParsing:
    def test_no_subcommand_is_config_error(self, capsys):
        assert main([]) == EXIT_CONFIG

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == EXIT_PASS

    def test_unknown_flag_is_config_error(self, capsys):
        assert main(["predict", "--bogus"]) == EXIT_CONFIG

    def test_output_path_writes_file(self, capsys, tmp_path):
        target = tmp_path / "out.csv"
        code, out, _ = run_cli(
            capsys, "predict", "--geometry", "flat", "--steps", "3,4",
            "--output", "csv", "--output-path", str(target),
        )
        assert code == EXIT_PASS
        assert target.read_text() == out

    def test_console_script_installed(self):
        proc = subprocess.run(
            [sys.executable, "-m", "randsteps.cli", "predict", "--geometry", "flat",
             "--steps", "3,4", "--output", "csv"],
            capture_output=True, text=True,
        )
        assert proc.returncode == EXIT_PASS
        assert "expected_norm" in proc.stdout
