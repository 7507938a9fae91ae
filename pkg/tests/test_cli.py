"""Command-line surface: subcommands, report formats, exit codes."""

import json
import subprocess
import sys

import pytest

from noisycube.cli import main

BEC03 = {"components": [{"w": 0.7, "t": 0.0}, {"w": 0.3, "t": 0.5}]}


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestVerifyTheorem:
    def test_passes_and_reports_schema(self, capsys):
        code, out, _ = run_cli(
            ["verify-theorem", "--n", "3", "--alpha", "0.2", "--no-timestamp"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert report["schema_version"] == 1
        result = report["results"][0]
        for key in (
            "n", "alpha", "M", "bound", "max_mi", "gap",
            "argmax", "partitions_examined", "runtime_ms",
        ):
            assert key in result
        assert result["partitions_examined"] == 2795
        assert abs(result["gap"]) < 1e-9
        assert result["runtime_ms"] == 0.0  # zeroed with --no-timestamp

    def test_alpha_grid(self, capsys):
        code, out, _ = run_cli(
            ["verify-theorem", "--n", "2", "--alpha-grid", "0.0,0.25,0.5", "--no-timestamp"],
            capsys,
        )
        assert code == 0
        assert len(json.loads(out)["results"]) == 3

    def test_budget_exit_code(self, capsys):
        code, _, err = run_cli(["verify-theorem", "--n", "4", "--alpha", "0.2"], capsys)
        assert code == 3
        assert "budget" in err

    def test_bad_alpha_is_usage_error(self, capsys):
        code, _, err = run_cli(["verify-theorem", "--n", "3", "--alpha", "0.9"], capsys)
        assert code == 2
        assert "usage error" in err

    def test_csv_not_available(self, capsys):
        code, _, err = run_cli(
            ["verify-theorem", "--n", "2", "--alpha", "0.2", "--format", "csv"], capsys
        )
        assert code == 2

    def test_unknown_flag_exits_two(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["verify-theorem", "--n", "3", "--bogus"])
        assert exc.value.code == 2


class TestHmnTable:
    def test_csv_output(self, capsys):
        code, out, _ = run_cli(
            ["hmn-table", "--n", "3", "--m", "1..4", "--alpha-grid", "0.1,0.3"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("# noisycube hmn-table csv schema v")
        header = lines[1].split(",")
        assert "min_entropy_monotone" in header
        assert "min_entropy_bruteforce" in header
        assert "min_entropy_closed_form" in header
        assert len(lines) == 2 + 4 * 2  # comment + header + rows

    def test_dimension_four_closed_forms_match_search_columns(self, capsys):
        code, out, _ = run_cli(
            [
                "hmn-table", "--n", "4", "--m", "1..8",
                "--alpha-grid", "0.1,0.3", "--format", "json",
            ],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert len(report["rows"]) == 8 * 2
        for row in report["rows"]:
            assert abs(row["min_entropy_monotone"] - row["min_entropy_bruteforce"]) < 1e-9
            if row["m"] <= 4:
                assert abs(row["min_entropy_closed_form"] - row["min_entropy_bruteforce"]) < 1e-9

    def test_monotone_only_reaches_higher_dimensions(self, capsys):
        code, out, _ = run_cli(
            ["hmn-table", "--n", "5", "--m", "1..4", "--alpha-grid", "0.2",
             "--no-bruteforce", "--format", "json"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        for row in report["rows"]:
            assert row["min_entropy_bruteforce"] is None

    def test_json_output_and_agreement(self, capsys):
        code, out, _ = run_cli(
            [
                "hmn-table", "--n", "2", "--m", "1,2,3,4",
                "--alpha-grid", "default", "--format", "json",
            ],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        for row in report["rows"]:
            assert abs(row["min_entropy_monotone"] - row["min_entropy_bruteforce"]) < 1e-9

    def test_bad_size_range(self, capsys):
        code, _, _ = run_cli(["hmn-table", "--n", "2", "--m", "0..9"], capsys)
        assert code == 2

    def test_nonpositive_budget_is_usage_error(self, capsys):
        code, _, err = run_cli(["hmn-table", "--n", "2", "--max-subsets", "0"], capsys)
        assert code == 2
        assert "positive" in err

    def test_tiny_budget_exits_three(self, capsys):
        code, _, _ = run_cli(
            ["hmn-table", "--n", "3", "--m", "4", "--alpha-grid", "0.1",
             "--max-subsets", "5"],
            capsys,
        )
        assert code == 3


class TestShift:
    def test_explicit_set(self, capsys):
        code, out, _ = run_cli(
            ["shift", "--n", "3", "--set", "7", "--alpha", "0.2", "--no-timestamp"], capsys
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert report["final"] == [0]
        assert [s["coordinate"] for s in report["steps"]] == [1, 2, 3]
        for step in report["steps"]:
            assert step["entropy_after"] <= step["entropy_before"] + 1e-9

    def test_random_set_is_seeded(self, capsys):
        argv = ["shift", "--n", "4", "--random-size", "5", "--alpha", "0.3",
                "--seed", "9", "--no-timestamp"]
        code, out1, _ = run_cli(argv, capsys)
        assert code == 0
        _, out2, _ = run_cli(argv, capsys)
        assert out1 == out2

    def test_set_and_random_size_conflict(self, capsys):
        code, _, _ = run_cli(
            ["shift", "--n", "3", "--set", "1", "--random-size", "2", "--alpha", "0.1"],
            capsys,
        )
        assert code == 2

    def test_vertex_out_of_range(self, capsys):
        code, _, _ = run_cli(["shift", "--n", "2", "--set", "5", "--alpha", "0.1"], capsys)
        assert code == 2


class TestSearch:
    def test_deterministic_reports(self, tmp_path):
        argv = [
            "search", "--n", "3", "--alpha", "0.2", "--samples", "300",
            "--seed", "5", "--no-timestamp",
        ]
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        assert main(argv + ["--output", str(a)]) == 0
        assert main(argv + ["--output", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_report_contents(self, capsys):
        code, out, _ = run_cli(
            ["search", "--n", "3", "--alpha", "0.2", "--samples", "200",
             "--seed", "1", "--no-timestamp"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["passed"] is True
        assert abs(report["projection_mi"] - report["bound"]) < 1e-9
        assert report["best_mi"] <= report["bound"] + 1e-9


class TestCheckLemmas:
    def test_passes(self, capsys):
        code, out, _ = run_cli(
            ["check-lemmas", "--n", "2", "--samples", "30", "--no-timestamp"], capsys
        )
        assert code == 0
        report = json.loads(out)
        names = [c["name"] for c in report["checks"]]
        for expected in (
            "monotone-sufficiency",
            "closed-forms",
            "min-entropy-monotonicity",
            "mixture-lower-bound",
            "size3-lower-bound",
            "size3-margin",
            "size3-margin-derivative",
            "bias-domination",
            "entropy-descent",
            "shifted-set-optimality",
            "cell-count-identity",
        ):
            assert expected in names

    def test_perturbation_flips_status_and_names_the_check(self, capsys):
        code, out, err = run_cli(
            ["check-lemmas", "--n", "2", "--samples", "10",
             "--perturb-hm", "3", "--no-timestamp"],
            capsys,
        )
        assert code == 1
        assert "FAILED: monotone-sufficiency" in err
        report = json.loads(out)
        assert report["passed"] is False


class TestBmsVerify:
    def test_passes(self, capsys, tmp_path):
        path = tmp_path / "bec.json"
        path.write_text(json.dumps(BEC03))
        code, out, _ = run_cli(
            ["bms-verify", "--channel", str(path), "--n", "3",
             "--samples", "40", "--no-timestamp"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert abs(report["capacity"] - 0.7) < 1e-12
        assert report["passed"] is True

    def test_missing_channel_file(self, capsys):
        code, _, _ = run_cli(
            ["bms-verify", "--channel", "/nonexistent.json", "--n", "2"], capsys
        )
        assert code == 2

    def test_malformed_channel_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\"components\": [{\"w\": 0.5}]}")
        code, _, _ = run_cli(["bms-verify", "--channel", str(path), "--n", "2"], capsys)
        assert code == 2


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "noisycube.cli", "check-lemmas", "--n", "2",
             "--samples", "5", "--no-timestamp"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["passed"] is True
