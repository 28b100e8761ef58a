"""
End-to-end tests: acceptance germs, determinism, failure reporting, CLI.
"""

import json

import pandas as pd
import pytest

from lepoly.cli import main
from lepoly.config import RunConfig
from lepoly.pipeline import run_pipeline


def _run(f, g="1", **kwargs):
    return run_pipeline(RunConfig(f=f, g=g, **kwargs))


def _triple(report):
    inv = report.invariants
    return inv.chi, inv.b0, inv.b1


class TestAcceptance:
    """Test known germs end to end."""

    def test_cusp(self):
        report = _run("x^2+y^3", oracle=True)
        assert report.status == "ok"
        assert report.exit_code == 0
        assert report.n == 2
        assert report.k == 3
        assert report.escape_count == 0
        assert _triple(report) == (-1, 1, 2)
        assert report.defect_chi == -1
        assert report.monodromy.status == "pass"
        assert all(p.cluster_count == 1 for p in report.special_points)
        assert all(p.direct_cluster_count == 1 for p in report.special_points)
        assert abs(complex(*report.geometry["t"])) == pytest.approx(1.25e-5)
        milnor = next(o for o in report.oracles if o.name == "milnor_number")
        assert milnor.value == 2
        assert milnor.agrees
        assert all(o.agrees for o in report.oracles)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_a_k(self, k):
        report = _run(f"x^2+y^{k + 1}", oracle=True)
        assert report.status == "ok", report.error
        assert report.k == k + 1
        assert report.invariants.b1 == k
        assert report.invariants.b0 == 1
        assert report.monodromy.status == "pass"
        milnor = next(o for o in report.oracles if o.name == "milnor_number")
        assert milnor.value == k
        assert milnor.agrees

    def test_e6(self):
        report = _run("x^3+y^4", oracle=True)
        assert report.status == "ok", report.error
        assert report.n == 3
        assert _triple(report) == (-5, 1, 6)
        assert all(len(p.partition) == 1 for p in report.special_points)
        milnor = next(o for o in report.oracles if o.name == "milnor_number")
        assert milnor.value == 6

    def test_annulus(self):
        report = _run("x", "y", oracle=True)
        assert report.status == "ok", report.error
        assert report.n == 1
        assert report.k == 0
        assert report.escape_count == 1
        assert _triple(report) == (0, 1, 1)
        assert abs(complex(*report.geometry["t"])) == pytest.approx(5e-3)
        annulus = next(o for o in report.oracles if o.name == "annulus")
        assert annulus.value == "0,1,1"
        assert annulus.agrees

    def test_cusp_times_conjugate_coordinate(self):
        report = _run("x^2+y^3", "y")
        assert report.status == "ok", report.error
        assert report.k == 2
        assert report.escape_count == 1
        escape = next(p for p in report.special_points if p.kind == "escape")
        assert escape.orbit_sizes == [2]
        assert escape.escaping_sheets == [0, 1]
        polar = [p for p in report.special_points if p.kind == "polar"]
        moduli = sorted(abs(complex(*p.y)) for p in polar)
        assert moduli == pytest.approx([0.0281, 0.0281], rel=1e-2)
        assert (report.invariants.vertices, report.invariants.edges) == (6, 8)
        assert report.invariants.chi == -2
        assert report.defect_chi == -2
        assert report.monodromy.status == "pass"

    def test_node_with_axis_term_is_swapped(self):
        report = _run("x^2+y^2+x^3")
        assert report.status == "ok", report.error
        assert report.hypotheses.coordinates_swapped
        assert report.n == 2
        assert report.invariants.b1 == 1

    def test_smooth_germ(self):
        report = _run("x", oracle=True)
        assert report.status == "ok", report.error
        assert report.k == 0
        assert report.escape_count == 0
        assert _triple(report) == (1, 1, 0)
        assert report.polar_curve == "1"


class TestStability:
    """Test determinism and independence from numerical choices."""

    def test_deterministic_report(self):
        assert _run("x^2+y^3").to_json() == _run("x^2+y^3").to_json()

    def test_jitter_seed_invariance(self):
        baseline = _triple(_run("x^2+y^3"))
        for seed in range(1, 6):
            report = _run("x^2+y^3", seed=seed)
            assert report.status == "ok", report.error
            assert _triple(report) == baseline

    def test_step_halving(self):
        coarse = _run("x^3+y^4")
        fine = _run("x^3+y^4", max_step=0.01)
        assert _triple(fine) == _triple(coarse)
        assert [p.permutation for p in fine.special_points] == [
            p.permutation for p in coarse.special_points
        ]

    def test_explicit_level(self):
        report = _run("x^2+y^3", t="1e-6")
        assert report.status == "ok", report.error
        assert _triple(report) == (-1, 1, 2)


class TestFailures:
    """Test failure reporting."""

    def test_common_factor(self):
        report = _run("x*y", "y")
        assert report.status == "failed"
        assert report.exit_code == 2
        assert "gcd(f,g) ≠ 1" in report.error
        assert report.hypotheses is not None

    def test_sheet_away_from_origin(self):
        report = _run("x^2+y^2+x^3", "y")
        assert report.status == "failed"
        assert report.exit_code == 2
        assert "not x-regular" in report.error
        assert report.geometry is None

    def test_even_germ_reports_non_generic_projection(self):
        report = _run("(x^2-y^3)*(x^2-2y^3)")
        assert report.status == "failed"
        assert report.exit_code == 3
        assert "not generic" in report.error
        assert "attempts" not in report.error

    def test_parse_error(self):
        report = _run("x^")
        assert report.exit_code == 1
        assert "position 2" in report.error

    def test_geometry_failure(self):
        report = _run("x", "y", t=0.5, max_retries=1)
        assert report.status == "failed"
        assert report.exit_code == 3
        assert report.hypotheses.passed


class TestCli:
    """Test the command-line entry point."""

    def test_report_and_artifacts(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = main(
            [
                "--f",
                "x^2+y^3",
                "--report",
                "report.json",
                "--dot",
                "graph.dot",
                "--csv",
                "paths.csv",
            ]
        )
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
        assert report["status"] == "ok"
        assert report["invariants"]["b1"] == 2
        dot = (tmp_path / "graph.dot").read_text()
        assert sum(" -- " in line for line in dot.splitlines()) == 6
        frame = pd.read_csv(tmp_path / "paths.csv")
        assert set(frame["kind"]) == {"path", "loop", "outer"}
        assert set(frame["sheet"]) == {0, 1}
        assert (tmp_path / "logs" / "lepoly.log").exists()

    def test_stdout(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["--f", "x", "--g", "y"]) == 0
        assert json.loads(capsys.readouterr().out)["invariants"]["chi"] == 0

    def test_hypothesis_exit_code(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["--f", "x*y", "--g", "y", "--report", "r.json"]) == 2

    def test_bad_flag_value_is_a_config_error(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["--f", "x", "--seed", "abc"]) == 1
        err = capsys.readouterr().err
        assert "usage: lepoly" in err
        assert "--seed" in err

    def test_missing_f_is_a_config_error(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["--g", "y"]) == 1
        assert "--f" in capsys.readouterr().err

    def test_invalid_level(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        assert main(["--f", "x", "--t=-1"]) == 1
        assert "invalid configuration" in capsys.readouterr().err
