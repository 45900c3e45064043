"""
Repair loop, benchmark and survey
"""

import pytest

from agents.backends import ScriptedBackend, ScriptedTranscript, TranscriptBook
from config import PipelineConfig
from ltl.parser import parse
from models import BenchmarkReport, Phase, PipelineStatus, RuleCheck, RuleSet, TaskEntry
from pipeline import (
    build_ap_library, initial_violation_survey, make_backend_factory, render_report_table,
    replay_transcript, run, run_benchmark, summarize_results, survey_entry,
)
from tests.conftest import FIXTURES, scripted
from utils.loaders import load_transcripts
from utils.validators import ValidationError

EVENTUALLY_B = RuleSet.from_pairs([("eventually_b", "F b", 0)])
ENTRY = TaskEntry("lamp", "Switch the lamp on at some point.")


def extraction_replies(formula):
    return [("nl-to-ltl", formula), ("ltl-to-nl", "In words."), ("nl-to-ltl", formula),
            ("ltl-to-nl", "In words."), ("nl-to-ltl", formula)]


@pytest.fixture
def all_pass_factory(config):
    return make_backend_factory(config, load_transcripts(FIXTURES / "transcripts" / "all_pass.txt"))


class TestBuildApLibrary:
    def test_sorted_union(self, traffic_rules):
        assert build_ap_library(traffic_rules) == (
            "arrive_destination", "left_turn", "right_turn", "straight_1km", "straight_500m")

    def test_empty_rules(self):
        with pytest.raises(ValidationError):
            build_ap_library(RuleSet())


class TestBackendFactory:
    def test_scripted_needs_transcript(self, config):
        with pytest.raises(ValidationError):
            make_backend_factory(config)

    def test_shared_transcript(self, config, running_example_transcript, traffic_dataset):
        factory = make_backend_factory(config, running_example_transcript)
        assert factory(traffic_dataset[0]) is factory(traffic_dataset[1])

    def test_per_entry_sections(self, all_pass_factory, traffic_dataset):
        first, second = all_pass_factory(traffic_dataset[0]), all_pass_factory(traffic_dataset[1])
        assert isinstance(first, ScriptedBackend)
        assert first.transcript != second.transcript


class TestRun:
    def test_running_example_reaches_compliance(self, running_example_entry, running_example_transcript,
                                                traffic_rules, config):
        backend = ScriptedBackend(running_example_transcript.default)
        result = run(running_example_entry, traffic_rules, config, backend)

        assert result.status == PipelineStatus.COMPLIANT
        assert result.iterations_used == 3
        assert result.agent_call_count == 12
        assert backend.remaining == 0
        assert result.final_formula == parse(
            "X(destinationLeftOnMapleStreet) & G(location_start -> (F(straight_200m) | G(!straight_200m))) "
            "& X(G(right_turn_Maple_St -> F(straight_500m & X(left_turn_Oak_St & F(straight_300m))))) "
            "& G(straight_1km & arrive_destination)")
        assert result.initial_formula == parse(
            "F(go_straight_200m) & X(G(right_turn_Maple_St -> "
            "F(go_straight_500m & X(left_turn_Oak_St & F(go_straight_300m)))))")
        assert result.emitted_formula == result.final_formula

    def test_running_example_trace(self, running_example_entry, running_example_transcript,
                                   traffic_rules, config):
        result = run(running_example_entry, traffic_rules, config,
                     ScriptedBackend(running_example_transcript.default))

        iteration_zero = [r.phase for r in result.trace if r.iteration == 0]
        assert iteration_zero[-2:] == [Phase.ALIGNMENT, Phase.INCLUSION]
        for iteration in (1, 2, 3):
            assert [r.phase for r in result.trace if r.iteration == iteration] == [
                Phase.CRITIQUE, Phase.REVISION, Phase.ALIGNMENT, Phase.INCLUSION]

        alignment = next(r for r in result.trace if r.phase == Phase.ALIGNMENT)
        assert "straight_500m" in alignment.formula
        assert "go_straight_500m" not in alignment.formula

        inclusion = [r for r in result.trace if r.phase == Phase.INCLUSION]
        assert [r.note for r in inclusion] == ["repair target"] * 3 + [None]
        assert inclusion[-1].verdict_summary == "included"

        revisions = [r for r in result.trace if r.phase == Phase.REVISION]
        assert revisions[0].formula.startswith("G(location_start -> F straight_200m)")
        assert revisions[0].agent_calls == ("ltl-revision",)

    def test_compliant_without_repair(self, config):
        backend = scripted(*extraction_replies("F a & F b"))
        result = run(ENTRY, EVENTUALLY_B, config, backend)
        assert result.status == PipelineStatus.COMPLIANT
        assert result.iterations_used == 0
        assert result.final_formula == result.initial_formula == parse("F a & F b")

    def test_iteration_cap_gives_non_output(self, traffic_rules, traffic_dataset):
        transcripts = load_transcripts(FIXTURES / "transcripts" / "never_compliant.txt")
        result = run(traffic_dataset[0], traffic_rules, PipelineConfig(max_iterations=1),
                     ScriptedBackend(transcripts.default))
        assert result.status == PipelineStatus.NON_OUTPUT
        assert result.iterations_used == 1
        assert result.final_formula is None
        assert result.emitted_formula is None
        assert result.agent_call_count == 7

    def test_extraction_failure(self, config):
        result = run(ENTRY, EVENTUALLY_B, config, scripted())
        assert result.status == PipelineStatus.EXTRACTION_FAILED
        assert result.iterations_used == 0
        assert result.trace[-1].phase == Phase.ERROR
        assert result.trace[-1].note.startswith("extraction failed")

    def test_agent_failure_consumes_iteration(self):
        backend = scripted(*extraction_replies("F a"),
                           ("critic-analysis", "No sections here."),
                           ("critic-analysis", "Still none."))
        result = run(ENTRY, EVENTUALLY_B, PipelineConfig(max_iterations=1), backend)
        assert result.status == PipelineStatus.NON_OUTPUT
        assert result.iterations_used == 1
        error = result.trace[-1]
        assert (error.phase, error.iteration, error.rule_name) == (Phase.ERROR, 1, "eventually_b")

    def test_repair_without_critic(self):
        backend = scripted(*extraction_replies("F a"), ("ltl-revision", "LTL: F a & F b"))
        result = run(ENTRY, EVENTUALLY_B, PipelineConfig(use_critic=False), backend)
        assert result.status == PipelineStatus.COMPLIANT
        assert result.iterations_used == 1
        assert Phase.CRITIQUE not in [r.phase for r in result.trace]

    def test_without_aligner(self, config):
        backend = scripted(*extraction_replies("F b"))
        result = run(ENTRY, EVENTUALLY_B, PipelineConfig(use_aligner=False), backend)
        assert result.is_compliant
        assert Phase.ALIGNMENT not in [r.phase for r in result.trace]

    def test_engine_failure(self, config, monkeypatch):
        monkeypatch.setattr("pipeline.check_against_rules",
                            lambda *args, **kwargs: [RuleCheck("eventually_b", error="out of memory")])
        result = run(ENTRY, EVENTUALLY_B, config, scripted(*extraction_replies("F a")))
        assert result.status == PipelineStatus.ENGINE_FAILED
        assert result.final_formula is None

    def test_unexpected_engine_exception(self, config, monkeypatch):
        def crash(*args, **kwargs):
            raise AssertionError("pair table out of sync")

        monkeypatch.setattr("inclusion.check_inclusion", crash)
        result = run(ENTRY, EVENTUALLY_B, config, scripted(*extraction_replies("F a")))
        assert result.status == PipelineStatus.ENGINE_FAILED
        assert "AssertionError: pair table out of sync" in result.trace[-1].note


class TestReplay:
    def test_trace_replays_to_identical_result(self, running_example_entry, running_example_transcript,
                                               traffic_rules, config):
        first = run(running_example_entry, traffic_rules, config,
                    ScriptedBackend(running_example_transcript.default))
        transcript = replay_transcript(first)
        assert transcript == running_example_transcript.default
        assert run(running_example_entry, traffic_rules, config, ScriptedBackend(transcript)) == first

    def test_non_output_run_replays(self, traffic_rules, traffic_dataset):
        transcripts = load_transcripts(FIXTURES / "transcripts" / "never_compliant.txt")
        config = PipelineConfig(max_iterations=1)
        first = run(traffic_dataset[0], traffic_rules, config, ScriptedBackend(transcripts.default))
        replayed = run(traffic_dataset[0], traffic_rules, config, ScriptedBackend(replay_transcript(first)))
        assert replayed == first
        assert replayed.trace[0].agent_replies == ()
        assert sum(len(r.agent_replies) for r in replayed.trace) == 7


class TestBenchmark:
    def test_all_pass(self, traffic_dataset, traffic_rules, config, all_pass_factory):
        report = run_benchmark(traffic_dataset, traffic_rules, config, all_pass_factory)
        assert report.mode == "repair"
        assert report.compliant_count == 3
        assert report.output_count == 3
        assert report.violation_rate == 0.0
        assert report.average_iterations == 0.0
        assert [e.entry_id for e in report.entries] == ["route-01", "route-02", "route-03"]
        assert all(e.agent_calls == 5 for e in report.entries)

    def test_parallel_entries(self, traffic_dataset, traffic_rules, all_pass_factory):
        config = PipelineConfig(parallel_entries=True, parallel_rules=True)
        report = run_benchmark(traffic_dataset, traffic_rules, config, all_pass_factory)
        assert [e.status for e in report.entries] == ["compliant"] * 3

    def test_shared_transcript_keeps_entries_in_order(self, running_example_entry,
                                                      running_example_transcript, traffic_rules):
        entries = [TaskEntry(f"route-{i}", running_example_entry.desired_task,
                             running_example_entry.environmental_info) for i in range(4)]
        book = TranscriptBook(default=ScriptedTranscript(running_example_transcript.default.entries * 4))
        config = PipelineConfig(parallel_entries=True)
        report = run_benchmark(entries, traffic_rules, config, make_backend_factory(config, book))
        assert [e.status for e in report.entries] == ["compliant"] * 4
        assert [e.iterations_used for e in report.entries] == [3] * 4

    def test_non_output_is_not_an_output(self, traffic_rules, traffic_dataset):
        transcripts = load_transcripts(FIXTURES / "transcripts" / "never_compliant.txt")
        config = PipelineConfig(max_iterations=1)
        report = run_benchmark(traffic_dataset[:1], traffic_rules, config,
                               make_backend_factory(config, transcripts))
        assert report.output_count == 0
        assert report.violation_rate == 0.0
        assert report.average_iterations is None
        assert report.entries[0].formula is None

    def test_duplicate_ids(self, traffic_rules, config, all_pass_factory):
        entry = TaskEntry("route-01", "Go.")
        with pytest.raises(ValidationError):
            run_benchmark([entry, entry], traffic_rules, config, all_pass_factory)

    def test_empty_dataset(self, traffic_rules, config, all_pass_factory):
        with pytest.raises(ValidationError):
            run_benchmark([], traffic_rules, config, all_pass_factory)


class TestSurvey:
    def test_initial_violations_are_counted(self, traffic_rules, traffic_dataset):
        transcripts = load_transcripts(FIXTURES / "transcripts" / "never_compliant.txt")
        config = PipelineConfig()
        report = initial_violation_survey(traffic_dataset[:1], traffic_rules, config,
                                          make_backend_factory(config, transcripts))
        assert report.mode == "survey"
        assert report.output_count == 1
        assert report.violation_rate == 1.0
        assert report.compliant_count == 0
        assert report.entries[0].status == "non-compliant"
        assert report.entries[0].violations == ("route_order",)
        assert report.entries[0].formula == "F straight_200m"

    def test_survey_entry_compliant(self, config):
        result = survey_entry(ENTRY, EVENTUALLY_B, config, scripted(*extraction_replies("F b")))
        assert result.status == PipelineStatus.COMPLIANT
        assert result.final_formula == result.initial_formula

    def test_survey_all_pass(self, traffic_dataset, traffic_rules, config, all_pass_factory):
        report = initial_violation_survey(traffic_dataset, traffic_rules, config, all_pass_factory)
        assert report.violation_rate == 0.0
        assert report.compliant_count == 3


class TestReport:
    def test_summary_rechecks_formulas(self, traffic_rules, config):
        compliant = run(ENTRY, EVENTUALLY_B, config, scripted(*extraction_replies("F b")))
        report = summarize_results([compliant], EVENTUALLY_B, "repair")
        assert report.entries[0].violations == ()
        report = summarize_results([compliant], RuleSet.from_pairs([("always_b", "G b", 0)]), "repair")
        assert report.entries[0].violations == ("always_b",)
        assert report.violation_rate == 1.0

    def test_dict_round_trip(self, traffic_dataset, traffic_rules, config, all_pass_factory):
        report = run_benchmark(traffic_dataset, traffic_rules, config, all_pass_factory)
        assert BenchmarkReport.from_dict(report.to_dict()) == report

    def test_table(self, traffic_dataset, traffic_rules, config, all_pass_factory):
        table = render_report_table(run_benchmark(traffic_dataset, traffic_rules, config,
                                                  all_pass_factory))
        lines = table.splitlines()
        assert lines[0].startswith("Entry")
        assert "Violations" in lines[0]
        assert lines[2].startswith("route-01")
        assert "Violation rate: 0.0%" in lines
        assert "Average iterations: 0.00" in lines
        assert "Outputs: 3 of 3" in lines
