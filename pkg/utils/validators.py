"""
Validation functions and error types for the safeltl toolkit
"""

import re
from typing import Iterable, List, Optional, Tuple


class SafeLTLError(Exception):
    """Base error for the toolkit"""
    pass


class ValidationError(SafeLTLError):
    """Custom validation error"""
    pass


class LTLSyntaxError(SafeLTLError):
    """Formula text failed the syntactic check"""

    def __init__(self, diagnostics: list, text: str = ""):
        self.diagnostics = list(diagnostics)
        self.text = text
        details = "; ".join(str(d) for d in self.diagnostics) or "syntax error"
        super().__init__(details)


class InclusionEngineError(SafeLTLError):
    """The inclusion engine produced an internally inconsistent result"""
    pass


class AgentError(SafeLTLError):
    """Base class for language-model agent failures"""
    pass


class TransportError(AgentError):
    """Remote backend unreachable after retries"""
    pass


class TranscriptError(AgentError):
    """Scripted transcript exhausted or out of step with the requests"""
    pass


class CredentialError(AgentError):
    """Remote backend requested without endpoint or token"""
    pass


class TemplateError(AgentError):
    """Unknown template or unbound placeholder"""
    pass


class ExtractionFailed(AgentError):
    """Six-step extraction did not yield a parseable formula"""
    pass


class CorrectionFailed(AgentError):
    """Syntax correction retries exhausted"""
    pass


class GuidanceMalformed(AgentError):
    """Critic reply is missing required sections"""
    pass


class RevisionFailed(AgentError):
    """Revised formula could not be parsed"""
    pass


class IdentifierValidator:
    """Validator for atomic proposition names"""

    IDENTIFIER_PATTERN = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*$')
    RESERVED_WORDS = {'G', 'F', 'X', 'U', 'true', 'false'}

    @staticmethod
    def validate_ap_name(name: str) -> Tuple[bool, str]:
        """Validate an atomic proposition name"""
        if not name:
            return False, "Atomic proposition name is required"

        if not IdentifierValidator.IDENTIFIER_PATTERN.match(name):
            return False, f"'{name}' is not a valid identifier"

        if name in IdentifierValidator.RESERVED_WORDS:
            return False, f"'{name}' is a reserved word"

        return True, ""


class RuleValidator:
    """Validator for rule file records"""

    RULE_NAME_PATTERN = re.compile(r'^[A-Za-z0-9_.\-]+$')

    @staticmethod
    def validate_rule_name(name: str) -> Tuple[bool, str]:
        """Validate rule name"""
        if not name:
            return False, "Rule name is required"

        if not RuleValidator.RULE_NAME_PATTERN.match(name):
            return False, "Rule name may contain only letters, digits, '_', '.' and '-'"

        return True, ""

    @staticmethod
    def validate_priority(priority_str: str) -> Tuple[bool, str]:
        """Validate rule priority"""
        if not priority_str or not priority_str.strip():
            return False, "Priority is required"

        try:
            int(priority_str.strip())
        except ValueError:
            return False, "Priority must be an integer"

        return True, ""


class TaskValidator:
    """Validator for dataset entries"""

    @staticmethod
    def validate_entry_id(entry_id: str) -> Tuple[bool, str]:
        """Validate dataset entry id"""
        if not entry_id or not entry_id.strip():
            return False, "Entry id is required"

        if any(ch.isspace() for ch in entry_id.strip()):
            return False, "Entry id must not contain whitespace"

        return True, ""

    @staticmethod
    def validate_desired_task(task: str) -> Tuple[bool, str]:
        """Validate desired task text"""
        if not task or not task.strip():
            return False, "Desired task is required"

        return True, ""


class ConfigValidator:
    """Validator for pipeline settings"""

    @staticmethod
    def validate_max_iterations(value: int) -> Tuple[bool, str]:
        """Validate the repair iteration cap"""
        if value < 1:
            return False, "max_iterations must be at least 1"
        return True, ""

    @staticmethod
    def validate_retry_bound(value: int, field_name: str) -> Tuple[bool, str]:
        """Validate a retry bound"""
        if value < 0:
            return False, f"{field_name} cannot be negative"
        return True, ""

    @staticmethod
    def validate_choice(value: str, choices: Iterable[str], field_name: str) -> Tuple[bool, str]:
        """Validate a selector against its allowed values"""
        allowed = list(choices)
        if value not in allowed:
            return False, f"{field_name} must be one of: {', '.join(allowed)}"
        return True, ""

    @staticmethod
    def validate_temperature(value: float) -> Tuple[bool, str]:
        """Validate sampling temperature"""
        if value < 0.0 or value > 2.0:
            return False, "temperature must be between 0 and 2"
        return True, ""


class RecordValidator:
    """Combined validators returning lists of error messages"""

    @staticmethod
    def validate_rule_record(name: str, priority: str, ltl_text: str) -> List[str]:
        """Validate one rule file record"""
        errors = []

        is_valid, error = RuleValidator.validate_rule_name(name)
        if not is_valid:
            errors.append(error)

        is_valid, error = RuleValidator.validate_priority(priority)
        if not is_valid:
            errors.append(error)

        if not ltl_text or not ltl_text.strip():
            errors.append("Rule formula is required")

        return errors

    @staticmethod
    def validate_task_record(entry_id: str, task: str) -> List[str]:
        """Validate one dataset record"""
        errors = []

        is_valid, error = TaskValidator.validate_entry_id(entry_id)
        if not is_valid:
            errors.append(error)

        is_valid, error = TaskValidator.validate_desired_task(task)
        if not is_valid:
            errors.append(error)

        return errors

    @staticmethod
    def validate_pipeline_settings(max_iterations: int, syntax_retry_bound: int,
                                   backend: str, aligner_mode: str,
                                   temperature: float,
                                   backends: Optional[Iterable[str]] = None,
                                   aligner_modes: Optional[Iterable[str]] = None) -> List[str]:
        """Validate the pipeline configuration fields"""
        errors = []

        is_valid, error = ConfigValidator.validate_max_iterations(max_iterations)
        if not is_valid:
            errors.append(error)

        is_valid, error = ConfigValidator.validate_retry_bound(syntax_retry_bound, "syntax_retry_bound")
        if not is_valid:
            errors.append(error)

        is_valid, error = ConfigValidator.validate_choice(
            backend, backends or ("scripted", "remote"), "backend")
        if not is_valid:
            errors.append(error)

        is_valid, error = ConfigValidator.validate_choice(
            aligner_mode, aligner_modes or ("auto", "llm", "similarity"), "aligner_mode")
        if not is_valid:
            errors.append(error)

        is_valid, error = ConfigValidator.validate_temperature(temperature)
        if not is_valid:
            errors.append(error)

        return errors
