"""
Data models and compliance bookkeeping for the safeltl toolkit
"""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from ltl.formula import Formula, render
from ltl.parser import parse
from ltl.semantics import LassoWord, Symbol
from utils.validators import RuleValidator, ValidationError


class VerdictStatus(Enum):
    INCLUDED = "included"
    NOT_INCLUDED = "not-included"


class AgentRole(Enum):
    USER_LLM = "user-llm"
    ALIGNER = "aligner"
    CRITIC = "critic"


class PipelineStatus(Enum):
    COMPLIANT = "compliant"
    NON_OUTPUT = "non-output"
    EXTRACTION_FAILED = "extraction-failed"
    ENGINE_FAILED = "engine-failed"
    NON_COMPLIANT = "non-compliant"


class Phase(Enum):
    EXTRACTION = "extraction"
    ALIGNMENT = "alignment"
    INCLUSION = "inclusion"
    CRITIQUE = "critique"
    REVISION = "revision"
    ERROR = "error"


@dataclass
class InclusionStats:
    expanded_pairs: int = 0
    symbol_comparisons: int = 0
    elapsed_ms: float = 0.0


@dataclass(frozen=True)
class DivergenceStep:
    pair: Tuple[int, int]
    symbol: Symbol


@dataclass(frozen=True)
class DivergencePath:
    steps: Tuple[DivergenceStep, ...]
    terminal_pair: Tuple[int, int]
    failing_symbol: Symbol

    @property
    def length(self) -> int:
        return len(self.steps)

    def render(self, alphabet: Sequence[str]) -> str:
        parts = []
        for step in self.steps:
            p, q = step.pair
            parts.append(f"({p},{q}) --[{step.symbol.render(alphabet)}]-->")
        p, q = self.terminal_pair
        parts.append(f"({p},{q}) blocked on [{self.failing_symbol.render(alphabet)}]")
        return " ".join(parts)


@dataclass
class InclusionVerdict:
    status: VerdictStatus
    counterexample: Optional[LassoWord] = None
    divergence: Optional[DivergencePath] = None
    stats: InclusionStats = field(default_factory=InclusionStats)
    alphabet: Tuple[str, ...] = ()
    divergence_note: Optional[str] = None
    # Atoms the counterexample depends on; None shows the whole alphabet
    relevant_atoms: Optional[Tuple[str, ...]] = None

    @property
    def is_included(self) -> bool:
        return self.status == VerdictStatus.INCLUDED

    def render_counterexample(self) -> str:
        atoms = self.alphabet if self.relevant_atoms is None else self.relevant_atoms
        return self.counterexample.render(atoms)

    def summary(self) -> str:
        if self.is_included:
            return "included"
        return f"not-included, counterexample {self.render_counterexample()}"


@dataclass(frozen=True)
class Rule:
    name: str
    formula: Formula
    priority: int = 0
    order: int = 0

    @property
    def text(self) -> str:
        return render(self.formula)


class RuleSet:
    """Base rules ordered by descending priority, then file order"""

    def __init__(self, rules: Sequence[Rule] = ()):
        self._rules: List[Rule] = []
        self._added = 0
        for rule in rules:
            self.add(rule)

    def add(self, rule: Rule) -> None:
        if any(r.name == rule.name for r in self._rules):
            raise ValidationError(f"Duplicate rule name '{rule.name}'")
        rule = replace(rule, order=self._added)
        self._added += 1
        self._rules.append(rule)
        self._rules.sort(key=lambda r: (-r.priority, r.order))

    @classmethod
    def from_pairs(cls, rules: Sequence[Tuple[str, str, int]]) -> "RuleSet":
        """Build from (name, ltl text, priority) triples"""
        ruleset = cls()
        for name, text, priority in rules:
            is_valid, message = RuleValidator.validate_rule_name(name)
            if not is_valid:
                raise ValidationError(message)
            ruleset.add(Rule(name, parse(text), priority))
        return ruleset

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return tuple(self._rules)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(r.name for r in self._rules)

    def get(self, name: str) -> Rule:
        for rule in self._rules:
            if rule.name == name:
                return rule
        raise KeyError(name)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self._rules)

    def __len__(self) -> int:
        return len(self._rules)


@dataclass(frozen=True)
class RuleCheck:
    rule_name: str
    verdict: Optional[InclusionVerdict] = None
    error: Optional[str] = None
    is_repair_target: bool = False

    @property
    def passed(self) -> bool:
        return self.verdict is not None and self.verdict.is_included

    @property
    def failed(self) -> bool:
        return self.verdict is not None and not self.verdict.is_included

    def summary(self) -> str:
        if self.error:
            return f"{self.rule_name}: engine error: {self.error}"
        return f"{self.rule_name}: {self.verdict.summary()}"


@dataclass(frozen=True)
class TaskEntry:
    entry_id: str
    desired_task: str
    environmental_info: str = ""


@dataclass(frozen=True)
class AgentRequest:
    role: AgentRole
    template_id: str
    bindings: Tuple[Tuple[str, str], ...]
    temperature: float = 0.0
    max_output_tokens: int = 1024

    @classmethod
    def build(cls, role: AgentRole, template_id: str, bindings: Dict[str, str],
              temperature: float = 0.0, max_output_tokens: int = 1024) -> "AgentRequest":
        return cls(role, template_id, tuple(sorted(bindings.items())), temperature, max_output_tokens)

    @property
    def binding_map(self) -> Dict[str, str]:
        return dict(self.bindings)


@dataclass(frozen=True)
class TokenUsage:
    input_tokens: int = 0
    output_tokens: int = 0


@dataclass(frozen=True)
class AgentResponse:
    text: str
    usage: TokenUsage
    backend_id: str


@dataclass(frozen=True)
class AgentCall:
    role: AgentRole
    template_id: str
    backend_id: str
    usage: TokenUsage
    reply: str = ""


@dataclass(frozen=True)
class CriticGuidance:
    counterexample_analysis: str
    proposed_adjustments: str
    general_guidance: str

    def render(self) -> str:
        return (
            f"Counterexample_Analysis:\n{self.counterexample_analysis.strip()}\n\n"
            f"Proposed_Adjustments:\n{self.proposed_adjustments.strip()}\n\n"
            f"General_Guidance:\n{self.general_guidance.strip()}\n"
        )


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    phase: Phase
    formula: Optional[str] = None
    rule_name: Optional[str] = None
    verdict_summary: Optional[str] = None
    agent_calls: Tuple[str, ...] = ()
    note: Optional[str] = None
    # Raw reply text per agent call, same order as agent_calls
    agent_replies: Tuple[str, ...] = ()

    @property
    def exchanges(self) -> Tuple[Tuple[str, str], ...]:
        return tuple(zip(self.agent_calls, self.agent_replies))


@dataclass
class PipelineResult:
    entry_id: str
    status: PipelineStatus
    final_formula: Optional[Formula] = None
    iterations_used: int = 0
    trace: List[TraceRecord] = field(default_factory=list)
    initial_formula: Optional[Formula] = None

    @property
    def is_compliant(self) -> bool:
        return self.status == PipelineStatus.COMPLIANT

    @property
    def agent_call_count(self) -> int:
        return sum(len(record.agent_calls) for record in self.trace)

    @property
    def emitted_formula(self) -> Optional[Formula]:
        return self.final_formula if self.is_compliant else None


@dataclass(frozen=True)
class EntrySummary:
    entry_id: str
    status: str
    iterations_used: int
    formula: Optional[str]
    agent_calls: int
    violations: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entry_id": self.entry_id,
            "status": self.status,
            "iterations_used": self.iterations_used,
            "formula": self.formula,
            "agent_calls": self.agent_calls,
            "violations": list(self.violations),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EntrySummary":
        return cls(
            entry_id=data["entry_id"],
            status=data["status"],
            iterations_used=data["iterations_used"],
            formula=data.get("formula"),
            agent_calls=data.get("agent_calls", 0),
            violations=tuple(data.get("violations", ())),
        )


@dataclass(frozen=True)
class BenchmarkReport:
    mode: str
    entries: Tuple[EntrySummary, ...]
    output_count: int
    violation_rate: float
    average_iterations: Optional[float]
    compliant_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "entries": [e.to_dict() for e in self.entries],
            "output_count": self.output_count,
            "violation_rate": self.violation_rate,
            "average_iterations": self.average_iterations,
            "compliant_count": self.compliant_count,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchmarkReport":
        return cls(
            mode=data["mode"],
            entries=tuple(EntrySummary.from_dict(e) for e in data["entries"]),
            output_count=data["output_count"],
            violation_rate=data["violation_rate"],
            average_iterations=data.get("average_iterations"),
            compliant_count=data["compliant_count"],
        )


class ComplianceRules:
    """Compliance decisions shared by the pipeline and the benchmark"""

    MAX_ITERATIONS = 25
    SYNTAX_RETRY_BOUND = 3
    CRITIC_REASKS = 1
    ALIGNER_REASKS = 1

    @staticmethod
    def all_included(checks: Sequence[RuleCheck]) -> bool:
        """True only when every rule produced an included verdict"""
        return bool(checks) and all(c.passed for c in checks)

    @staticmethod
    def repair_target(checks: Sequence[RuleCheck]) -> Optional[RuleCheck]:
        """Highest-priority failing check"""
        for check in checks:
            if check.is_repair_target:
                return check
        return next((c for c in checks if c.failed), None)

    @staticmethod
    def engine_errors(checks: Sequence[RuleCheck]) -> List[RuleCheck]:
        return [c for c in checks if c.error is not None]

    @staticmethod
    def violation_rate(violating: int, outputs: int) -> float:
        """Fraction of emitted outputs failing any rule"""
        if outputs == 0:
            return 0.0
        return violating / outputs
