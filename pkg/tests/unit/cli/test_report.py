"""
Tests for check results and JSON reports.
"""

import json

import numpy as np
import pytest

from spinframe import __version__
from spinframe.cli.report import SCHEMA, CheckResult, Report
from spinframe.exceptions import ChartExit


class TestCheckResult:
    """Single checks."""

    def test_from_value(self):
        check = CheckResult.from_value("holonomy", np.float64(2e-7), 1e-6)
        assert check.passed
        assert check.to_dict() == {"name": "holonomy", "max_residual": 2e-7,
                                   "mean_residual": 2e-7, "tolerance": 1e-6, "pass": True}

    def test_edges_get_twice_the_tolerance(self):
        values = np.zeros((8, 8))
        values[0, 3] = 1.5e-5
        check = CheckResult.from_field("killing", values, 1e-5)
        assert check.passed
        assert check.details == {"interior_max": 0.0, "edge_max": 1.5e-5}
        values[4, 4] = 1.5e-5
        assert not CheckResult.from_field("killing", values, 1e-5).passed

    def test_without_edge_allowance(self):
        values = np.zeros((8, 8))
        values[0, 0] = 1.5e-5
        assert not CheckResult.from_field("unit", values, 1e-5, fd_order=None).passed

    def test_undefined_points_are_skipped(self):
        values = np.full((6, 6), 1e-8)
        values[2, 3] = np.nan
        check = CheckResult.from_field("recover_A", values, 1e-4, emit_grid=True)
        assert check.passed
        assert check.details["undefined_points"] == 1
        assert check.to_dict()["grid"][2][3] is None

    def test_all_undefined(self):
        check = CheckResult.from_field("recover_A", np.full((4, 4), np.nan), 1e-4)
        assert not check.passed
        assert check.max_residual is None

    def test_from_error(self):
        error = ChartExit("left the chart", {"step": 3})
        check = CheckResult.from_error("reconstruction", error, 1e-5)
        assert not check.passed
        assert check.to_dict()["details"]["error"] == {
            "code": "chart_exit", "message": "left the chart", "details": {"step": 3}}


class TestReport:
    """Reports and their serialization."""

    def make_report(self):
        report = Report("check", "scene.json", provenance={"input_sha256": "abc", "grid": [4, 4]})
        report.add(CheckResult.from_value("gauss", 1e-6, 5e-5))
        report.data["summary"] = {"K": np.array([0.5, np.inf])}
        return report

    def test_provenance(self):
        provenance = self.make_report().to_dict()["provenance"]
        assert provenance["schema"] == SCHEMA
        assert provenance["version"] == __version__
        assert provenance["grid"] == [4, 4]

    def test_pass_is_conjunction(self):
        report = self.make_report()
        assert report.passed
        report.add(CheckResult.from_value("codazzi", 1.0, 5e-5))
        assert not report.passed
        assert report.failed_checks() == ["codazzi"]
        assert report.to_dict()["pass"] is False

    def test_json_is_deterministic(self):
        first, second = self.make_report().to_json(), self.make_report().to_json()
        assert first == second
        assert first.endswith("\n")
        document = json.loads(first)
        assert document["data"]["summary"]["K"] == [0.5, None]
        assert list(document) == sorted(document)

    def test_write(self, tmp_path, capsys):
        report = self.make_report()
        path = tmp_path / "report.json"
        report.write(str(path))
        assert path.read_text() == report.to_json()
        report.write()
        assert capsys.readouterr().out == report.to_json()


@pytest.mark.parametrize("value, expected", [(np.bool_(True), True), (np.int64(3), 3),
                                             (np.float32(0.5), 0.5), (float("nan"), None)])
def test_clean_values(value, expected):
    report = Report("inspect", "x", data={"value": value})
    assert report.to_dict()["data"]["value"] == expected
