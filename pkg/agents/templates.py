"""
Prompt templates with named {placeholder} slots
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Mapping, Optional

from models import AgentRole
from utils.validators import TemplateError

PLACEHOLDER_PATTERN = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

TEMPLATES_DIR = Path(__file__).resolve().parent / "prompts"

NL_TO_LTL = "nl-to-ltl"
LTL_TO_NL = "ltl-to-nl"
AP_MATCHING = "ap-matching"
SYNTAX_CORRECTION = "syntax-correction"
CRITIC_ANALYSIS = "critic-analysis"
LTL_REVISION = "ltl-revision"

TEMPLATE_ROLES = {
    NL_TO_LTL: AgentRole.USER_LLM,
    LTL_TO_NL: AgentRole.USER_LLM,
    SYNTAX_CORRECTION: AgentRole.USER_LLM,
    LTL_REVISION: AgentRole.USER_LLM,
    AP_MATCHING: AgentRole.ALIGNER,
    CRITIC_ANALYSIS: AgentRole.CRITIC,
}


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    text: str

    @property
    def placeholders(self) -> FrozenSet[str]:
        return frozenset(PLACEHOLDER_PATTERN.findall(self.text))

    def render(self, bindings: Mapping[str, str]) -> str:
        """Fill every placeholder; unbound placeholders are an error"""
        missing = sorted(self.placeholders - set(bindings))
        if missing:
            raise TemplateError(f"Template '{self.template_id}' has unbound placeholders: {', '.join(missing)}")
        return PLACEHOLDER_PATTERN.sub(lambda m: bindings[m.group(1)], self.text)


class TemplateRegistry:
    """The six prompt templates, loaded from a directory of <template-id>.txt files"""

    def __init__(self, directory: Optional[Path] = None):
        self.directory = Path(directory) if directory else TEMPLATES_DIR
        self._templates: Dict[str, PromptTemplate] = {}
        for template_id in TEMPLATE_ROLES:
            path = self.directory / f"{template_id}.txt"
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as e:
                raise TemplateError(f"Cannot read template {path}: {e}")
            self._templates[template_id] = PromptTemplate(template_id, text)

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in self._templates:
            raise TemplateError(f"Unknown template '{template_id}'")
        return self._templates[template_id]

    def render(self, template_id: str, bindings: Mapping[str, str]) -> str:
        return self.get(template_id).render(bindings)

    def __iter__(self):
        return iter(self._templates.values())
