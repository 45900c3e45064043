"""
Language-model agents: extraction, syntax correction, AP alignment, critique and revision
"""

import logging
import re
from typing import Dict, List, Optional, Sequence, Tuple, Union

from agents.backends import RemoteBackend, TextBackend
from agents.templates import (
    AP_MATCHING, CRITIC_ANALYSIS, LTL_REVISION, LTL_TO_NL, NL_TO_LTL, SYNTAX_CORRECTION,
    TEMPLATE_ROLES, TemplateRegistry,
)
from automata.buchi import BuchiAutomaton
from config import PipelineConfig
from ltl.formula import Formula, atom_renaming, atomic_propositions, render, rewrite_aps
from ltl.lexer import SyntaxDiagnostic
from ltl.parser import check_syntax, parse
from models import (
    AgentCall, AgentRequest, AgentResponse, ComplianceRules, CriticGuidance, TokenUsage,
)
from utils.helpers import clean_llm_reply
from utils.similarity import similarity_map
from utils.validators import (
    AgentError, CorrectionFailed, ExtractionFailed, GuidanceMalformed,
    RevisionFailed, ValidationError,
)

logger = logging.getLogger(__name__)

SECTION_HEADER = re.compile(
    r"^[\s#*>\-]*(?:\d+[.)]\s*)?\**\s*"
    r"(counterexample[ _]analysis|proposed[ _]adjustments|general[ _]guidance)"
    r"\s*\**\s*:?\s*\**\s*(.*)$",
    re.IGNORECASE,
)


def render_diagnostics(diagnostics: Sequence[SyntaxDiagnostic]) -> str:
    return "\n".join(f"- {d.kind.value} at position {d.position}: {d.message}" for d in diagnostics)


def parse_guidance(text: str) -> Optional[CriticGuidance]:
    """Split a critic reply into its three sections, in any order"""
    sections: Dict[str, List[str]] = {}
    current = None
    for line in (text or "").splitlines():
        match = SECTION_HEADER.match(line)
        if match:
            current = match.group(1).lower().replace(" ", "_")
            sections[current] = [match.group(2)] if match.group(2).strip() else []
        elif current is not None:
            sections[current].append(line)

    parts = {name: "\n".join(lines).strip() for name, lines in sections.items()}
    required = ("counterexample_analysis", "proposed_adjustments", "general_guidance")
    if not all(parts.get(name) for name in required):
        return None
    return CriticGuidance(parts["counterexample_analysis"], parts["proposed_adjustments"],
                          parts["general_guidance"])


class SpecificationAgents:
    """User LLM, aligner and critic behind one backend"""

    def __init__(self, backend: TextBackend, config: Optional[PipelineConfig] = None,
                 templates: Optional[TemplateRegistry] = None):
        self.backend = backend
        self.config = config or PipelineConfig()
        self.templates = templates or TemplateRegistry()
        self.calls: List[AgentCall] = []
        self.artifacts: List[Tuple[str, str]] = []
        self._taken = 0

    def complete(self, request: AgentRequest) -> AgentResponse:
        """Render the request's template and send it to the backend"""
        prompt = self.templates.render(request.template_id, request.binding_map)
        response = self.backend.complete(request, prompt)
        self.calls.append(AgentCall(request.role, request.template_id, response.backend_id, response.usage,
                                    response.text))
        logger.info("Agent call %s via %s (%d input / %d output tokens)", request.template_id,
                    response.backend_id, response.usage.input_tokens, response.usage.output_tokens)
        return response

    def take_calls(self) -> List[AgentCall]:
        """Calls made since the previous take"""
        calls = self.calls[self._taken:]
        self._taken = len(self.calls)
        return calls

    def usage_totals(self) -> TokenUsage:
        return TokenUsage(sum(c.usage.input_tokens for c in self.calls),
                          sum(c.usage.output_tokens for c in self.calls))

    def _ask(self, template_id: str, bindings: Dict[str, str]) -> str:
        request = AgentRequest.build(TEMPLATE_ROLES[template_id], template_id, bindings,
                                     self.config.temperature, self.config.max_output_tokens)
        return self.complete(request).text

    def _record(self, step: str, text: str):
        self.artifacts.append((step, text))

    def extract_ltl(self, task: str, env: str = "") -> Formula:
        """Six-step extraction with round-trip translations and a syntax check"""
        if not task or not task.strip():
            raise ValidationError("Desired task is required")
        self.artifacts = []

        nl = task.strip()
        if env and env.strip():
            nl += "\n\nEnvironmental information:\n" + env.strip()

        # Step 1: NL to LTL-1
        ltl1 = clean_llm_reply(self._ask(NL_TO_LTL, {"nl": nl}))
        self._record("LTL-1", ltl1)

        # Step 2: LTL-1 back to NL-1
        nl1 = self._ask(LTL_TO_NL, {"ltl": ltl1}).strip()
        self._record("NL-1", nl1)

        # Step 3: NL-1 to LTL-2
        ltl2_text = clean_llm_reply(self._ask(NL_TO_LTL, {"nl": nl1}))
        self._record("LTL-2", ltl2_text)

        # Step 4: syntactic check with correction
        diagnostics = check_syntax(ltl2_text)
        if diagnostics:
            self._record("Syntax check", render_diagnostics(diagnostics))
            try:
                ltl2 = self.correct_syntax(ltl2_text, diagnostics)
            except CorrectionFailed as e:
                raise ExtractionFailed(f"LTL-2 could not be corrected: {e}")
            self._record("LTL-2 corrected", render(ltl2))
        else:
            ltl2 = parse(ltl2_text)

        # Step 5: LTL-2 back to NL-2
        nl2 = self._ask(LTL_TO_NL, {"ltl": render(ltl2)}).strip()
        self._record("NL-2", nl2)

        # Step 6: NL-2 to the final formula
        final_text = clean_llm_reply(self._ask(NL_TO_LTL, {"nl": nl2}))
        self._record("Final LTL", final_text)
        diagnostics = check_syntax(final_text)
        if not diagnostics:
            return parse(final_text)
        try:
            return self.correct_syntax(final_text, diagnostics)
        except CorrectionFailed as e:
            raise ExtractionFailed(f"Final formula could not be corrected: {e}")

    def correct_syntax(self, ltl_text: str, diagnostics: Sequence[SyntaxDiagnostic],
                       retry_bound: Optional[int] = None) -> Formula:
        """Ask for corrections until the formula parses or the retry bound runs out"""
        if not diagnostics:
            raise ValidationError("Syntax correction needs at least one diagnostic")
        bound = max(1, self.config.syntax_retry_bound if retry_bound is None else retry_bound)

        text, current = ltl_text, list(diagnostics)
        for attempt in range(bound):
            reply = clean_llm_reply(self._ask(SYNTAX_CORRECTION, {
                "syntactic_check_output": render_diagnostics(current),
                "ltl_formula": text,
            }))
            current = check_syntax(reply)
            if not current:
                logger.info("Syntax corrected after %d round(s)", attempt + 1)
                return parse(reply)
            logger.warning("Correction round %d still has %d problem(s)", attempt + 1, len(current))
            text = reply

        raise CorrectionFailed(f"Formula still malformed after {bound} correction round(s): "
                               f"{render_diagnostics(current)}")

    def _aligner_mode(self) -> str:
        mode = self.config.aligner_mode
        if mode == "auto":
            return "llm" if isinstance(self.backend, RemoteBackend) else "similarity"
        return mode

    def align_aps(self, f: Formula, library: Sequence[str]) -> Formula:
        """Rename atoms to library names; structure never changes"""
        if not library:
            raise ValidationError("AP library is empty")

        if self._aligner_mode() == "llm":
            aligned = self._align_with_model(f, library)
            if aligned is not None:
                return aligned
            logger.warning("Aligner replies rejected; using similarity matching")

        mapping = similarity_map(atomic_propositions(f), library)
        if mapping:
            logger.info("Aligned atoms: %s", ", ".join(f"{k} -> {v}" for k, v in sorted(mapping.items())))
        return rewrite_aps(f, mapping)

    def _align_with_model(self, f: Formula, library: Sequence[str]) -> Optional[Formula]:
        allowed = set(library) | set(atomic_propositions(f))
        for _ in range(1 + ComplianceRules.ALIGNER_REASKS):
            try:
                reply = clean_llm_reply(self._ask(AP_MATCHING, {
                    "LTL": render(f),
                    "atomic_proposition_library": ", ".join(library),
                }))
                diagnostics = check_syntax(reply)
                if diagnostics:
                    candidate = self.correct_syntax(reply, diagnostics, retry_bound=1)
                else:
                    candidate = parse(reply)
            except CorrectionFailed as e:
                logger.warning("Aligner reply does not parse: %s", e)
                continue
            except AgentError as e:
                logger.warning("Aligner call failed: %s", e)
                return None

            mapping = atom_renaming(f, candidate)
            if mapping is not None and set(mapping.values()) <= allowed:
                return candidate
            logger.warning("Aligner reply changes more than atom names: %s", reply)
        return None

    def critique(self, phi: Formula, rule: Formula, a1: BuchiAutomaton, a2: BuchiAutomaton,
                 report: str) -> CriticGuidance:
        """Critic analysis of a failed inclusion check"""
        bindings = {
            "LTL": render(phi),
            "input_BA": a1.to_text(),
            "comparison_BA": a2.to_text(),
            "checking_output": report,
            "comparison_LTL": render(rule),
        }
        for attempt in range(1 + ComplianceRules.CRITIC_REASKS):
            guidance = parse_guidance(self._ask(CRITIC_ANALYSIS, bindings))
            if guidance is not None:
                return guidance
            logger.warning("Critic reply %d is missing sections", attempt + 1)
        raise GuidanceMalformed("Critic reply lacks Counterexample_Analysis, "
                                "Proposed_Adjustments or General_Guidance")

    def revise(self, phi: Formula, guidance: Union[CriticGuidance, str], env: str = "") -> Formula:
        """Revised formula from the critic's guidance or a raw checker report"""
        understanding = guidance.render() if isinstance(guidance, CriticGuidance) else str(guidance)
        if env and env.strip():
            understanding = understanding.rstrip() + "\n\nEnvironmental information:\n" + env.strip()

        reply = clean_llm_reply(self._ask(LTL_REVISION, {
            "LTL": render(phi),
            "understanding_output": understanding,
        }))
        diagnostics = check_syntax(reply)
        if not diagnostics:
            return parse(reply)
        try:
            return self.correct_syntax(reply, diagnostics, retry_bound=1)
        except CorrectionFailed as e:
            raise RevisionFailed(f"Revised formula unusable: {e}")
