"""
Tests for the delaylmi command-line interface.
"""

import json
from unittest.mock import patch

import pytest
import yaml

from delaylmi import __version__
from delaylmi.cli import (
    EXIT_ERROR,
    EXIT_HIERARCHY,
    EXIT_INFEASIBLE,
    EXIT_OK,
    main,
    parse_scan,
    parse_spec,
)
from delaylmi.core.stability import lifting_scan
from delaylmi.errors import ArgumentError
from delaylmi.models import (
    DelayPoint,
    DelayRange,
    HierarchyTable,
    HierarchyViolation,
    LmiSpec,
)


@pytest.fixture(autouse=True)
def isolated_project(tmp_path, monkeypatch):
    """Run every command from an empty project with no user configuration"""
    root = tmp_path / "project"
    root.mkdir()
    (root / "pyproject.toml").write_text("[project]\nname = 'demo'\n")
    home = tmp_path / "home"
    home.mkdir()
    monkeypatch.setenv("HOME", str(home))
    monkeypatch.chdir(root)
    for name in ("DELAYLMI_JOBS", "DELAYLMI_FORMAT", "DELAYLMI_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    return root


def _fake_range(spec, tau_max, lo=1, hi=60):
    points = [
        DelayPoint(t, t <= tau_max, 0.5 if t <= tau_max else -0.5, 10, "margin_positive")
        for t in range(lo, hi + 1)
    ]
    return DelayRange(spec, points, lo, hi)


class TestArgumentParsing:
    """Scan and spec parsing helpers"""

    def test_parse_scan(self):
        assert parse_scan("1:200") == (1, 200)

    def test_parse_scan_rejects_garbage(self):
        with pytest.raises(ArgumentError, match="LO:HI"):
            parse_scan("1-200")
        with pytest.raises(ArgumentError, match="empty"):
            parse_scan("9:3")

    def test_parse_spec(self):
        assert parse_spec(2, 4, None).nus == (4, 3)
        assert parse_spec(2, 4, "4,1").nus == (4, 1)

    def test_parse_spec_mismatch(self):
        with pytest.raises(ArgumentError, match="must start with nu1=4"):
            parse_spec(2, 4, "3,1")

    def test_parse_spec_rejects_non_integers(self):
        with pytest.raises(ArgumentError, match="comma-separated integers") as exc:
            parse_spec(2, 2, "2,x")
        assert exc.value.field == "nus"


class TestMain:
    """Top-level dispatch and error handling"""

    def test_no_command(self, capsys):
        assert main([]) == EXIT_ERROR
        assert "usage" in capsys.readouterr().out

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_missing_system_file(self, capsys):
        code = main(["certify", "--system", "absent.json", "--m", "1", "--nu1", "1"])
        assert code == EXIT_ERROR
        assert "no such file or bundled system" in capsys.readouterr().err

    def test_invalid_spec_is_an_error(self, capsys):
        code = main(["certify", "--system", "ex1", "--m", "2", "--nu1", "1", "--nus", "1,1"])
        assert code == EXIT_ERROR
        assert "strictly decreasing" in capsys.readouterr().err

    def test_non_integer_nus_is_an_error(self, capsys):
        code = main(["certify", "--system", "ex1", "--m", "2", "--nu1", "2", "--nus", "2,x"])
        assert code == EXIT_ERROR
        assert "comma-separated integers" in capsys.readouterr().err

    def test_unknown_log_level_in_project_file(self, isolated_project, capsys):
        (isolated_project / ".delaylmi.yaml").write_text("log_level: verbose\n")
        assert main(["lift", "--system", "ex1"]) == EXIT_OK
        captured = capsys.readouterr()
        assert "stable delays: [0, 58]" in captured.out
        assert "Invalid value for log_level" in captured.err

    def test_non_integer_jobs_in_project_file(self, isolated_project, capsys):
        (isolated_project / ".delaylmi.yaml").write_text("jobs: four\nlog_level: info\n")
        with patch("delaylmi.cli.lifting_scan", wraps=lifting_scan) as mock_scan:
            assert main(["lift", "--system", "ex1"]) == EXIT_OK
        assert mock_scan.call_args[0][3] == 1
        assert "Invalid value for jobs" in capsys.readouterr().err


class TestCertify:
    def test_feasible_delay(self, capsys):
        code = main(
            ["certify", "--system", "ex1", "--tau", "5", "--m", "1", "--nu1", "1"]
        )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "tau=5" in out
        assert "feasible" in out

    def test_json_report(self, capsys):
        code = main(
            ["certify", "--system", "ex1", "--tau", "5", "--m", "1", "--nu1", "0", "--json"]
        )
        payload = json.loads(capsys.readouterr().out)
        assert code == EXIT_OK
        record = payload["records"][0]
        assert record["tau"] == 5
        assert record["nodv"] == 9
        assert payload["metadata"]["system"] == "ex1"

    def test_infeasible_delay(self, capsys):
        code = main(
            ["certify", "--system", "ex1", "--tau", "58", "--m", "1", "--nu1", "1"]
        )
        assert code == EXIT_INFEASIBLE
        assert "infeasible" in capsys.readouterr().out


class TestMaxDelay:
    """Delay scans through the CLI"""

    def test_summary_and_csv(self, tmp_path, capsys):
        out_file = tmp_path / "scan.csv"
        spec = LmiSpec.default(1, 2)
        with patch(
            "delaylmi.cli.max_delay", return_value=_fake_range(spec, 57)
        ) as mock_scan:
            code = main(
                [
                    "max-delay",
                    "--system",
                    "ex1",
                    "--m",
                    "1",
                    "--nu1",
                    "2",
                    "--scan",
                    "1:60",
                    "--csv",
                    str(out_file),
                ]
            )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "tau_M = 57" in out
        assert "NoDV = 27" in out
        assert "tau_min" not in out
        scan = mock_scan.call_args[0][2]
        assert list(scan) == list(range(1, 61))
        lines = out_file.read_text().splitlines()
        assert len(lines) == 61
        assert lines[1].startswith("ex1,1,2,1,true,")

    def test_reports_left_edge(self, capsys):
        spec = LmiSpec.default(1, 2)
        points = [
            DelayPoint(t, 12 <= t <= 168, 0.1 if 12 <= t <= 168 else -0.1)
            for t in range(1, 201)
        ]
        rng = DelayRange(spec, points, 1, 200)
        with patch("delaylmi.cli.max_delay", return_value=rng):
            code = main(
                ["max-delay", "--system", "ex2", "--m", "1", "--nu1", "2", "--scan", "1:200"]
            )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "tau_M = 168" in out
        assert "tau_min = 12" in out

    def test_nothing_feasible(self, capsys):
        spec = LmiSpec.default(1, 0)
        with patch("delaylmi.cli.max_delay", return_value=_fake_range(spec, 0)):
            code = main(["max-delay", "--system", "ex1", "--m", "1", "--nu1", "0"])
        assert code == EXIT_INFEASIBLE
        assert "no feasible delay in 1:70" in capsys.readouterr().out

    def test_notes_positive_margin_below_tolerance(self, capsys):
        spec = LmiSpec.default(1, 4)
        points = [DelayPoint(t, True, 1e-3) for t in range(160, 169)]
        points += [DelayPoint(169, False, 6.8e-7), DelayPoint(170, False, -4.8e-9)]
        rng = DelayRange(spec, points, 160, 170)
        with patch("delaylmi.cli.max_delay", return_value=rng):
            code = main(
                ["max-delay", "--system", "ex2", "--m", "1", "--nu1", "4", "--scan", "160:170"]
            )
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "tau_M = 168" in out
        assert "margin stays positive up to tau=169" in out

    def test_no_note_when_boundaries_agree(self, capsys):
        spec = LmiSpec.default(1, 2)
        with patch("delaylmi.cli.max_delay", return_value=_fake_range(spec, 57)):
            main(["max-delay", "--system", "ex1", "--m", "1", "--nu1", "2", "--scan", "1:60"])
        assert "margin stays positive" not in capsys.readouterr().out


class TestHierarchy:
    ARGS = ["hierarchy", "--system", "ex1", "--lmax", "2", "--numax", "1"]

    def _table(self, violations):
        cells = {
            (1, 0): _fake_range(LmiSpec.default(1, 0), 42),
            (1, 1): _fake_range(LmiSpec.default(1, 1), 57),
            (2, 1): _fake_range(LmiSpec.default(2, 1), 57),
        }
        return HierarchyTable(2, 1, cells, violations)

    def test_markdown_table(self, capsys):
        with patch("delaylmi.cli.hierarchy_table", return_value=self._table([])):
            code = main(self.ARGS + ["--scan", "1:60"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "| 1 | 42 | 57 |" in out

    def test_csv_format(self, capsys):
        with patch("delaylmi.cli.hierarchy_table", return_value=self._table([])):
            main(self.ARGS + ["--format", "csv"])
        assert "1,0,42,1" in capsys.readouterr().out

    def test_violation_exit_code(self, capsys):
        violation = HierarchyViolation("right", (1, 0), (1, 1), 42, 40)
        with patch("delaylmi.cli.hierarchy_table", return_value=self._table([violation])):
            code = main(self.ARGS)
        assert code == EXIT_HIERARCHY
        assert "hierarchy violation" in capsys.readouterr().out


class TestLift:
    """Exact stable delays"""

    def test_first_benchmark(self, capsys):
        assert main(["lift", "--system", "ex1"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "stable delays: [0, 58]" in out
        assert "NoDV at tau=58: 7021" in out

    def test_third_benchmark(self, capsys):
        assert main(["lift", "--system", "ex3", "--scan", "0:70"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "[0, 56]" in out
        assert "14706" in out

    def test_nothing_stable(self, capsys):
        assert main(["lift", "--system", "ex1", "--scan", "60:70"]) == EXIT_INFEASIBLE
        assert "empty" in capsys.readouterr().out


class TestVerifyIneq:
    def test_small_suite_passes(self, capsys):
        code = main(["verify-ineq", "--trials", "20", "--nmax", "3", "--seed", "5"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "failed: 0" in out


class TestConfigCommand:
    """Configuration display and initialization"""

    def test_show(self, capsys):
        assert main(["config"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "Active Settings" in out
        assert "feas_tol" in out

    def test_init(self, isolated_project):
        assert main(["config", "init"]) == EXIT_OK
        data = yaml.safe_load((isolated_project / ".delaylmi.yaml").read_text())
        assert data["max_iterations"] == 200

    def test_init_refuses_overwrite(self, isolated_project):
        target = isolated_project / ".delaylmi.yaml"
        target.write_text("jobs: 4\n")
        assert main(["config", "init"]) == EXIT_ERROR
        assert target.read_text() == "jobs: 4\n"
        assert main(["config", "init", "--force"]) == EXIT_OK
        assert yaml.safe_load(target.read_text())["jobs"] == 1

    def test_project_format_is_used(self, isolated_project, capsys):
        (isolated_project / ".delaylmi.yaml").write_text("output_format: csv\n")
        table = HierarchyTable(1, 0, {(1, 0): _fake_range(LmiSpec.default(1, 0), 42)})
        with patch("delaylmi.cli.hierarchy_table", return_value=table):
            main(["hierarchy", "--system", "ex1", "--lmax", "1", "--numax", "0"])
        assert capsys.readouterr().out.startswith("l,nu1,tau_max,tau_min")
