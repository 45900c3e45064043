"""
Command line entry points
"""

import json

import pytest

from main import EXIT_ENGINE, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE, main
from models import BenchmarkReport, RuleCheck
from tests.conftest import FIXTURES

ROUTE_TASK_FILE = str(FIXTURES / "formulas" / "route_task.ltl")
ROUTE_COMPLIANT_FILE = str(FIXTURES / "formulas" / "route_compliant.ltl")
TRAFFIC_RULES = str(FIXTURES / "rules" / "traffic.rules")
RUNNING_EXAMPLE = str(FIXTURES / "datasets" / "running_example.txt")
TRAFFIC_SAMPLES = str(FIXTURES / "datasets" / "traffic_samples.txt")


def transcript(name):
    return str(FIXTURES / "transcripts" / f"{name}.txt")


class TestStageCommands:
    def test_parse(self, capsys):
        assert main(["parse", "G((a))"]) == EXIT_OK
        assert capsys.readouterr().out == "G a\n"

    def test_parse_error(self, capsys):
        assert main(["parse", "G (a"]) == EXIT_NEGATIVE
        assert capsys.readouterr().out.startswith("unbalanced-paren at 2")

    def test_parse_file(self, capsys):
        assert main(["parse", "--file", ROUTE_COMPLIANT_FILE]) == EXIT_OK
        assert "straight_1km & arrive_destination" in capsys.readouterr().out

    def test_parse_missing_file(self, tmp_path):
        assert main(["parse", "--file", str(tmp_path / "missing.ltl")]) == EXIT_USAGE

    def test_parse_without_input(self):
        assert main(["parse"]) == EXIT_USAGE

    def test_unknown_command(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_check_syntax(self, capsys):
        assert main(["check-syntax", "G a & F b"]) == EXIT_OK
        assert capsys.readouterr().out == "No syntax errors.\n"
        assert main(["check-syntax", "a b"]) == EXIT_NEGATIVE
        assert "missing-operator" in capsys.readouterr().out

    def test_translate(self, capsys):
        assert main(["translate", "G F a"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("aps: a\n")
        assert main(["translate", "--dot", "--prune", "G F a"]) == EXIT_OK
        assert capsys.readouterr().out.startswith('digraph "formula" {')

    def test_translate_syntax_error(self):
        assert main(["translate", "G (a"]) == EXIT_USAGE

    def test_include_not_included(self, capsys):
        assert main(["include", ROUTE_TASK_FILE, TRAFFIC_RULES]) == EXIT_NEGATIVE
        out = capsys.readouterr().out
        assert out.startswith("Rule route_order:\n")
        assert "Counterexample: " in out
        assert "Not included." in out

    def test_include_included(self, capsys):
        assert main(["include", "--report", ROUTE_COMPLIANT_FILE, TRAFFIC_RULES]) == EXIT_OK
        assert capsys.readouterr().out == "Rule route_order: Included.\nIncluded.\n"

    def test_include_writes_dot_files(self, tmp_path):
        dot_dir = tmp_path / "dot"
        main(["include", "--dot-dir", str(dot_dir), ROUTE_TASK_FILE, TRAFFIC_RULES])
        assert sorted(p.name for p in dot_dir.iterdir()) == [
            "input.dot", "route_order.dot", "route_order_product.dot"]

    def test_include_missing_rules(self, tmp_path):
        assert main(["include", ROUTE_TASK_FILE, str(tmp_path / "none.rules")]) == EXIT_USAGE

    def test_path(self, capsys):
        assert main(["path", "F b", "G a"]) == EXIT_OK
        assert capsys.readouterr().out == "(0,0) blocked on [!a & !b]\n"

    def test_path_none(self, capsys):
        assert main(["path", "G a", "G a"]) == EXIT_NEGATIVE
        assert capsys.readouterr().out == "No divergence found.\n"


class TestRunCommands:
    def test_run_running_example(self, capsys):
        code = main(["run", RUNNING_EXAMPLE, TRAFFIC_RULES, "--transcript", transcript("running_example")])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "route-01: compliant after 3 iteration(s)" in out
        assert "G(straight_1km & arrive_destination)" in out

    def test_run_iteration_cap(self, capsys):
        code = main(["run", RUNNING_EXAMPLE, TRAFFIC_RULES, "--transcript", transcript("never_compliant"),
                     "--max-iters", "1"])
        assert code == EXIT_NEGATIVE
        assert "route-01: non-output after 1 iteration(s)" in capsys.readouterr().out

    def test_run_writes_summary(self, tmp_path):
        out = tmp_path / "run.json"
        main(["run", RUNNING_EXAMPLE, TRAFFIC_RULES, "--transcript", transcript("running_example"),
              "--out", str(out)])
        data = json.loads(out.read_text())
        assert data["mode"] == "repair"
        assert data["average_iterations"] == 3.0

    def test_bench_all_pass(self, tmp_path, capsys):
        out = tmp_path / "results.json"
        code = main(["bench", TRAFFIC_SAMPLES, TRAFFIC_RULES, "--transcript", transcript("all_pass"),
                     "--out", str(out), "--parallel"])
        assert code == EXIT_OK
        report = BenchmarkReport.from_dict(json.loads(out.read_text()))
        assert report.violation_rate == 0.0
        assert report.compliant_count == 3
        assert "Violation rate: 0.0%" in capsys.readouterr().out

    def test_bench_pdf(self, tmp_path):
        pdf = tmp_path / "report.pdf"
        main(["bench", TRAFFIC_SAMPLES, TRAFFIC_RULES, "--transcript", transcript("all_pass"),
              "--out", str(tmp_path / "results.json"), "--pdf", str(pdf)])
        assert pdf.read_bytes().startswith(b"%PDF")

    def test_survey(self, tmp_path):
        out = tmp_path / "survey.json"
        code = main(["survey", RUNNING_EXAMPLE, TRAFFIC_RULES, "--transcript", transcript("never_compliant"),
                     "--out", str(out)])
        assert code == EXIT_OK
        data = json.loads(out.read_text())
        assert data["mode"] == "survey"
        assert data["violation_rate"] == 1.0

    def test_remote_backend_needs_credentials(self, tmp_path):
        code = main(["bench", TRAFFIC_SAMPLES, TRAFFIC_RULES, "--backend", "remote",
                     "--out", str(tmp_path / "results.json")])
        assert code == EXIT_USAGE
        assert not (tmp_path / "results.json").exists()

    def test_scripted_backend_needs_transcript(self, tmp_path):
        code = main(["bench", TRAFFIC_SAMPLES, TRAFFIC_RULES, "--out", str(tmp_path / "results.json")])
        assert code == EXIT_USAGE

    def test_bad_iteration_cap(self):
        code = main(["run", RUNNING_EXAMPLE, TRAFFIC_RULES, "--transcript", transcript("running_example"),
                     "--max-iters", "0"])
        assert code == EXIT_USAGE

    def test_engine_failure_exit_code(self, monkeypatch):
        monkeypatch.setattr("pipeline.check_against_rules",
                            lambda *args, **kwargs: [RuleCheck("route_order", error="out of memory")])
        code = main(["run", RUNNING_EXAMPLE, TRAFFIC_RULES, "--transcript", transcript("running_example")])
        assert code == EXIT_ENGINE


@pytest.mark.parametrize("argv", [["--help"], ["parse", "--help"]])
def test_help_exits_cleanly(argv):
    assert main(argv) == EXIT_OK
