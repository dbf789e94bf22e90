import json
import subprocess
import sys
from pathlib import Path

import pytest

from norden.cli import main
from norden.pointwise import point_to_json, random_point
from norden.report import Report, emit_report

REQUIRED_KEYS = {"check", "class", "params", "residual", "tolerance", "pass", "seed"}


def run_cli(args):
    proc = subprocess.run(
        [sys.executable, "-m", "norden.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc


class TestEmit:
    def test_empty_report_is_empty_json_list(self):
        assert emit_report(Report(), "json") == "[]"

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            emit_report(Report(), "yaml")


class TestClassifyCommand:
    def test_classify_random_point(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["classify", "--seed", "3", "--dim", "4", "--out", str(out)])
        assert code == 0
        records = json.loads(out.read_text())
        assert records and all(set(r) == REQUIRED_KEYS for r in records)

    def test_classify_fixture_file(self, tmp_path):
        fixture = tmp_path / "point.json"
        fixture.write_text(point_to_json(random_point(5, 4)))
        proc = run_cli(["classify", "--point", str(fixture)])
        assert proc.returncode == 0
        assert "class: " in proc.stderr

    def test_classify_generated_class(self, tmp_path):
        out = tmp_path / "w3.json"
        code = main(["classify", "--class", "W3", "--seed", "9", "--out", str(out)])
        assert code == 0
        records = json.loads(out.read_text())
        assert all(r["class"] == "W3" for r in records)

    def test_missing_fixture_is_config_error(self):
        proc = run_cli(["classify", "--point", "/does/not/exist.json"])
        assert proc.returncode == 2


class TestConnectionsCommand:
    def test_default_params_pass(self, tmp_path):
        out = tmp_path / "conn.json"
        code = main(["connections", "--seed", "11", "--out", str(out)])
        assert code == 0
        records = json.loads(out.read_text())
        names = {r["check"] for r in records}
        assert "connections.almost_complex" in names
        assert "connections.metric_derivative_agreement" in names

    def test_pq_flag(self):
        proc = run_cli(["connections", "--pq", "0,0.25", "--class", "W1+W2"])
        assert proc.returncode == 0

    def test_bad_params_rejected(self):
        proc = run_cli(["connections", "--params", "1,2,3"])
        assert proc.returncode == 2
        assert "configuration error" in proc.stderr


class TestTable1Command:
    def test_json_is_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["table1", "--seed", "7", "--out", str(a)]) == 0
        assert main(["table1", "--seed", "7", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_changes_residuals_not_schema(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["table1", "--seed", "1", "--out", str(a)])
        main(["table1", "--seed", "2", "--out", str(b)])
        ra = json.loads(a.read_text())
        rb = json.loads(b.read_text())
        assert [r["check"] for r in ra] == [r["check"] for r in rb]

    def test_text_layout_uses_stated_row_names(self):
        proc = run_cli(["table1", "--format", "text"])
        assert proc.returncode == 0
        for label in ("almost complex", "natural", "canonical",
                      "T is a 3-form", "symmetric"):
            assert label in proc.stdout

    def test_figures_rendered(self, tmp_path):
        figs = tmp_path / "figs"
        code = main(["table1", "--figures", str(figs), "--out",
                     str(tmp_path / "t.json")])
        assert code == 0
        rendered = sorted(p.name for p in figs.glob("*.png"))
        assert rendered == ["table1_residuals.png", "table1_table1.png"]


class TestCurvatureCommand:
    def test_flat_chart_validates(self, tmp_path):
        out = tmp_path / "flat.json"
        code = main(["curvature", "--chart", "flat", "--out", str(out)])
        assert code == 0

    def test_unknown_chart_is_config_error(self):
        proc = run_cli(["curvature", "--chart", "moebius"])
        assert proc.returncode == 2

    def test_conformal_chart_reports_tau_discrepancies(self, tmp_path):
        out = tmp_path / "ck.json"
        code = main(["curvature", "--chart", "conformal_kahler", "--out", str(out)])
        records = json.loads(out.read_text())
        by_name = {}
        for r in records:
            by_name.setdefault(r["check"], []).append(r["pass"])
        # structural two-route checks hold; the stated scalar-gradient
        # closed forms do not, and the report says so rather than hiding it
        assert all(by_name["w1.curvature_structure"])
        assert all(by_name["tau.cyclic_identity"])
        assert not any(by_name["tau.gradient"])
        assert code == 1


class TestSuiteCommand:
    def test_small_suite_runs_and_reports(self, tmp_path):
        out = tmp_path / "suite.json"
        code = main([
            "suite", "--seed", "1", "--trials", "8", "--dim", "4",
            "--chart", "flat", "--out", str(out),
        ])
        assert code == 0  # flat-only run has no failing checks
        records = json.loads(out.read_text())
        assert any(r["check"].startswith("pointwise.roundtrip") for r in records)
        assert any(r["check"].startswith("table1.") for r in records)

    def test_full_suite_exit_reflects_known_failures(self, tmp_path):
        out = tmp_path / "suite_full.json"
        code = main([
            "suite", "--seed", "1", "--trials", "4", "--dim", "4",
            "--out", str(out),
        ])
        assert code == 1
        records = json.loads(out.read_text())
        failing = {r["check"] for r in records if not r["pass"]}
        assert failing <= {
            "tau.gradient", "tau_star.gradient", "tau.cauchy_riemann",
            "tau.theta_recovery", "tau.theta_star_recovery", "tau.squared_norm",
        }

    def test_invalid_trials_is_config_error(self):
        proc = run_cli(["suite", "--trials", "0"])
        assert proc.returncode == 2
        assert "configuration error" in proc.stderr

    def test_byte_identical_reports_for_same_config(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        args = ["suite", "--seed", "5", "--trials", "4", "--dim", "4",
                "--chart", "flat"]
        main(args + ["--out", str(a)])
        main(args + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()
