"""
Self-supervised loop: extraction, alignment, rule inclusion and
counterexample-guided repair, plus the benchmark harness
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, List, Optional, Sequence, Tuple

from agents.backends import (
    RemoteBackend, ScriptedBackend, ScriptedTranscript, TextBackend, TranscriptBook,
)
from agents.llm_agents import SpecificationAgents
from automata.translate import translate
from config import BackendSettings, PipelineConfig
from inclusion import check_against_rules, render_counterexample_report
from ltl.formula import Formula, atomic_propositions, render
from models import (
    BenchmarkReport, ComplianceRules, EntrySummary, Phase, PipelineResult, PipelineStatus,
    RuleCheck, RuleSet, TaskEntry, TraceRecord,
)
from utils.helpers import format_optional_number, format_percentage, truncate_string
from utils.validators import AgentError, ValidationError

logger = logging.getLogger(__name__)

BackendFactory = Callable[[TaskEntry], TextBackend]


def build_ap_library(rules: RuleSet) -> Tuple[str, ...]:
    """Atomic propositions of every rule, sorted"""
    if not len(rules):
        raise ValidationError("Rule set is empty")
    names = set()
    for rule in rules:
        names.update(atomic_propositions(rule.formula))
    return tuple(sorted(names))


def make_backend_factory(config: PipelineConfig, transcripts: Optional[TranscriptBook] = None,
                         settings: Optional[BackendSettings] = None) -> BackendFactory:
    """Backend per entry: transcript sections, one shared transcript, or the remote endpoint"""
    if transcripts is not None:
        if transcripts.is_per_entry:
            return lambda entry: ScriptedBackend(transcripts.for_entry(entry.entry_id))
        if transcripts.default is None:
            raise ValidationError("Transcript file contains no replies")
        shared = ScriptedBackend(transcripts.default)
        return lambda entry: shared

    if config.backend == "remote":
        remote = RemoteBackend(replace(settings or BackendSettings.from_env(), seed=config.random_seed))
        return lambda entry: remote
    raise ValidationError("The scripted backend needs a transcript file")


def replay_transcript(result: PipelineResult) -> ScriptedTranscript:
    """Every agent exchange of a finished run, in call order"""
    return ScriptedTranscript(tuple(exchange for record in result.trace for exchange in record.exchanges))


class _EntryRun:
    """Trace bookkeeping for one dataset entry"""

    def __init__(self, entry: TaskEntry, rules: RuleSet, config: PipelineConfig,
                 backend: TextBackend):
        self.entry = entry
        self.rules = rules
        self.config = config
        self.agents = SpecificationAgents(backend, config)
        self.library = build_ap_library(rules)
        self.trace: List[TraceRecord] = []

    def record(self, iteration: int, phase: Phase, formula: Optional[Formula] = None,
               rule_name: Optional[str] = None, verdict_summary: Optional[str] = None,
               note: Optional[str] = None):
        calls = self.agents.take_calls()
        self.trace.append(TraceRecord(
            iteration, phase, render(formula) if formula is not None else None,
            rule_name, verdict_summary, tuple(call.template_id for call in calls), note,
            tuple(call.reply for call in calls),
        ))

    def extract(self) -> Formula:
        try:
            phi = self.agents.extract_ltl(self.entry.desired_task, self.entry.environmental_info)
        finally:
            for step, text in self.agents.artifacts:
                self.trace.append(TraceRecord(0, Phase.EXTRACTION, note=f"{step}: {text}"))
        self.record(0, Phase.EXTRACTION, phi, note="extracted")
        return phi

    def align(self, iteration: int, phi: Formula) -> Formula:
        if self.config.use_aligner:
            phi = self.agents.align_aps(phi, self.library)
            self.record(iteration, Phase.ALIGNMENT, phi)
        return phi

    def check(self, iteration: int, phi: Formula) -> List[RuleCheck]:
        checks = check_against_rules(phi, self.rules, self.config.parallel_rules,
                                     self.config.minimize_counterexamples)
        for check in checks:
            summary = check.verdict.summary() if check.verdict else None
            note = "repair target" if check.is_repair_target else check.error
            self.record(iteration, Phase.INCLUSION, phi, check.rule_name, summary, note)
        return checks

    def repair(self, iteration: int, phi: Formula, target: RuleCheck) -> Formula:
        rule = self.rules.get(target.rule_name)
        a1, a2 = translate(phi), translate(rule.formula)
        report = render_counterexample_report(target.verdict, a1, a2)

        if self.config.use_critic:
            guidance = self.agents.critique(phi, rule.formula, a1, a2, report)
            self.record(iteration, Phase.CRITIQUE, phi, rule.name,
                        note=truncate_string(guidance.counterexample_analysis, 200))
        else:
            guidance = report

        revised = self.agents.revise(phi, guidance, self.entry.environmental_info)
        self.record(iteration, Phase.REVISION, revised)
        return self.align(iteration, revised)

    def result(self, status: PipelineStatus, iterations: int, final: Optional[Formula] = None,
               initial: Optional[Formula] = None) -> PipelineResult:
        logger.info("Entry %s finished: %s after %d iteration(s)", self.entry.entry_id,
                    status.value, iterations)
        return PipelineResult(self.entry.entry_id, status, final, iterations, self.trace, initial)


def run(entry: TaskEntry, rules: RuleSet, config: PipelineConfig,
        backend: Optional[TextBackend] = None) -> PipelineResult:
    """Extract, check and repair one task until every rule passes or the cap is hit"""
    if backend is None:
        backend = make_backend_factory(config)(entry)
    state = _EntryRun(entry, rules, config, backend)
    logger.info("Entry %s: extraction", entry.entry_id)

    try:
        phi = state.extract()
        initial = phi
        phi = state.align(0, phi)
    except (AgentError, ValidationError) as e:
        state.record(0, Phase.ERROR, note=f"extraction failed: {e}")
        return state.result(PipelineStatus.EXTRACTION_FAILED, 0)

    checks = state.check(0, phi)
    iteration = 0
    while True:
        if ComplianceRules.engine_errors(checks):
            return state.result(PipelineStatus.ENGINE_FAILED, iteration, initial=initial)
        if ComplianceRules.all_included(checks):
            return state.result(PipelineStatus.COMPLIANT, iteration, final=phi, initial=initial)
        if iteration >= config.max_iterations:
            return state.result(PipelineStatus.NON_OUTPUT, iteration, initial=initial)

        iteration += 1
        logger.info("Entry %s: repair iteration %d", entry.entry_id, iteration)
        target = ComplianceRules.repair_target(checks)
        try:
            phi = state.repair(iteration, phi, target)
        except AgentError as e:
            logger.warning("Entry %s iteration %d: %s", entry.entry_id, iteration, e)
            state.record(iteration, Phase.ERROR, phi, target.rule_name, note=str(e))
            continue
        checks = state.check(iteration, phi)


def _shares_scripted_backend(backends: Sequence[TextBackend]) -> bool:
    scripted = [id(backend) for backend in backends if isinstance(backend, ScriptedBackend)]
    return len(scripted) != len(set(scripted))


def _run_entries(dataset: Sequence[TaskEntry], factory: BackendFactory,
                 worker: Callable[[TaskEntry, TextBackend], PipelineResult],
                 parallel: bool) -> List[PipelineResult]:
    jobs = [(entry, factory(entry)) for entry in dataset]
    if parallel and _shares_scripted_backend([backend for _, backend in jobs]):
        # A scripted transcript is consumed in order, so its entries cannot interleave
        logger.warning("Entries share one scripted transcript; running them sequentially")
        parallel = False
    if parallel and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=min(8, len(jobs))) as executor:
            return list(executor.map(lambda job: worker(*job), jobs))
    return [worker(entry, backend) for entry, backend in jobs]


def _check_unique_ids(dataset: Sequence[TaskEntry]):
    if not dataset:
        raise ValidationError("Dataset is empty")
    ids = [entry.entry_id for entry in dataset]
    if len(set(ids)) != len(ids):
        raise ValidationError("Dataset entry ids must be unique")


def summarize_results(results: Sequence[PipelineResult], rules: RuleSet, mode: str,
                      parallel_rules: bool = False) -> BenchmarkReport:
    """Report with the violation rate recomputed from scratch over emitted formulas"""
    entries = []
    outputs = violating = compliant = 0
    iterations = []

    for result in results:
        formula = result.final_formula
        if formula is None and mode == "survey" and result.status == PipelineStatus.NON_COMPLIANT:
            formula = result.initial_formula

        violations: Tuple[str, ...] = ()
        if formula is not None:
            outputs += 1
            checks = check_against_rules(formula, rules, parallel_rules, minimize=False)
            violations = tuple(c.rule_name for c in checks if not c.passed)
            if violations:
                violating += 1
        if result.is_compliant:
            compliant += 1
            iterations.append(result.iterations_used)

        entries.append(EntrySummary(
            entry_id=result.entry_id,
            status=result.status.value,
            iterations_used=result.iterations_used,
            formula=render(formula) if formula is not None else None,
            agent_calls=result.agent_call_count,
            violations=violations,
        ))

    average = round(sum(iterations) / len(iterations), 4) if iterations else None
    return BenchmarkReport(
        mode=mode,
        entries=tuple(entries),
        output_count=outputs,
        violation_rate=round(ComplianceRules.violation_rate(violating, outputs), 6),
        average_iterations=average,
        compliant_count=compliant,
    )


def run_benchmark(dataset: Sequence[TaskEntry], rules: RuleSet, config: PipelineConfig,
                  backend_factory: Optional[BackendFactory] = None) -> BenchmarkReport:
    """Run every entry and measure violations independently"""
    _check_unique_ids(dataset)
    factory = backend_factory or make_backend_factory(config)
    results = _run_entries(dataset, factory, lambda entry, backend: run(entry, rules, config, backend),
                           config.parallel_entries)
    return summarize_results(results, rules, "repair", config.parallel_rules)


def survey_entry(entry: TaskEntry, rules: RuleSet, config: PipelineConfig,
                 backend: TextBackend) -> PipelineResult:
    """Extraction, alignment and one round of checks, without repair"""
    state = _EntryRun(entry, rules, config, backend)
    try:
        phi = state.align(0, state.extract())
    except (AgentError, ValidationError) as e:
        state.record(0, Phase.ERROR, note=f"extraction failed: {e}")
        return state.result(PipelineStatus.EXTRACTION_FAILED, 0)

    checks = state.check(0, phi)
    if ComplianceRules.engine_errors(checks):
        return state.result(PipelineStatus.ENGINE_FAILED, 0, initial=phi)
    if ComplianceRules.all_included(checks):
        return state.result(PipelineStatus.COMPLIANT, 0, final=phi, initial=phi)
    return state.result(PipelineStatus.NON_COMPLIANT, 0, initial=phi)


def initial_violation_survey(dataset: Sequence[TaskEntry], rules: RuleSet, config: PipelineConfig,
                             backend_factory: Optional[BackendFactory] = None) -> BenchmarkReport:
    """How many initial formulas already comply"""
    _check_unique_ids(dataset)
    factory = backend_factory or make_backend_factory(config)
    results = _run_entries(dataset, factory,
                           lambda entry, backend: survey_entry(entry, rules, config, backend),
                           config.parallel_entries)
    return summarize_results(results, rules, "survey", config.parallel_rules)


def render_report_table(report: BenchmarkReport) -> str:
    """Fixed-width summary for the terminal"""
    header = f"{'Entry':<16} {'Status':<18} {'Iter':>4} {'Calls':>5}  Violations"
    lines = [header, "-" * len(header)]
    for entry in report.entries:
        violations = ", ".join(entry.violations) if entry.violations else "-"
        lines.append(f"{truncate_string(entry.entry_id, 16):<16} {entry.status:<18} "
                     f"{entry.iterations_used:>4} {entry.agent_calls:>5}  {violations}")
    lines.append("-" * len(header))
    lines.append(f"Mode: {report.mode}")
    lines.append(f"Outputs: {report.output_count} of {len(report.entries)}")
    lines.append(f"Compliant: {report.compliant_count}")
    lines.append(f"Violation rate: {format_percentage(report.violation_rate)}")
    lines.append(f"Average iterations: {format_optional_number(report.average_iterations)}")
    return "\n".join(lines) + "\n"
