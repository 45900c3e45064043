"""
Environment-driven configuration for the safeltl toolkit
"""

import os
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from models import ComplianceRules
from utils.helpers import parse_bool, safe_float, safe_int
from utils.validators import RecordValidator, ValidationError

# Load environment variables
load_dotenv()

BACKENDS = ("scripted", "remote")
ALIGNER_MODES = ("auto", "llm", "similarity")


@dataclass(frozen=True)
class BackendSettings:
    """Connection settings for the remote chat backend"""
    endpoint: Optional[str] = None
    model: str = "gpt-4-32k"
    api_token: Optional[str] = None
    timeout: float = 60.0
    transport_retries: int = 3
    backoff_seconds: float = 1.0
    # Sampling seed forwarded to the endpoint; None leaves it out
    seed: Optional[int] = None

    @classmethod
    def from_env(cls) -> "BackendSettings":
        return cls(
            endpoint=os.environ.get('SAFELTL_LLM_ENDPOINT') or None,
            model=os.environ.get('SAFELTL_LLM_MODEL', 'gpt-4-32k'),
            api_token=os.environ.get('SAFELTL_LLM_TOKEN') or None,
            timeout=safe_float(os.environ.get('SAFELTL_LLM_TIMEOUT'), 60.0),
            transport_retries=safe_int(os.environ.get('SAFELTL_LLM_RETRIES'), 3),
            backoff_seconds=safe_float(os.environ.get('SAFELTL_LLM_BACKOFF'), 1.0),
        )

    @property
    def has_credentials(self) -> bool:
        return bool(self.endpoint and self.api_token)


@dataclass(frozen=True)
class PipelineConfig:
    max_iterations: int = ComplianceRules.MAX_ITERATIONS
    syntax_retry_bound: int = ComplianceRules.SYNTAX_RETRY_BOUND
    parallel_rules: bool = False
    parallel_entries: bool = False
    minimize_counterexamples: bool = True
    backend: str = "scripted"
    aligner_mode: str = "auto"
    use_aligner: bool = True
    use_critic: bool = True
    temperature: float = 0.0
    max_output_tokens: int = 1024
    random_seed: int = 0

    def __post_init__(self):
        errors = RecordValidator.validate_pipeline_settings(
            self.max_iterations, self.syntax_retry_bound, self.backend,
            self.aligner_mode, self.temperature, BACKENDS, ALIGNER_MODES,
        )
        if errors:
            raise ValidationError("; ".join(errors))

    @classmethod
    def from_env(cls, **overrides: Any) -> "PipelineConfig":
        """Defaults, overlaid with SAFELTL_* variables, overlaid with explicit overrides"""
        values: Dict[str, Any] = {}
        env = os.environ
        if 'SAFELTL_MAX_ITERATIONS' in env:
            values['max_iterations'] = safe_int(env['SAFELTL_MAX_ITERATIONS'], -1)
        if 'SAFELTL_SYNTAX_RETRIES' in env:
            values['syntax_retry_bound'] = safe_int(env['SAFELTL_SYNTAX_RETRIES'], -1)
        if 'SAFELTL_PARALLEL_RULES' in env:
            values['parallel_rules'] = parse_bool(env['SAFELTL_PARALLEL_RULES'])
        if 'SAFELTL_MINIMIZE' in env:
            values['minimize_counterexamples'] = parse_bool(env['SAFELTL_MINIMIZE'])
        if 'SAFELTL_BACKEND' in env:
            values['backend'] = env['SAFELTL_BACKEND'].strip().lower()
        if 'SAFELTL_ALIGNER' in env:
            values['aligner_mode'] = env['SAFELTL_ALIGNER'].strip().lower()
        if 'SAFELTL_TEMPERATURE' in env:
            values['temperature'] = safe_float(env['SAFELTL_TEMPERATURE'], -1.0)
        if 'SAFELTL_SEED' in env:
            values['random_seed'] = safe_int(env['SAFELTL_SEED'], 0)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def log_level_from_env(default: str = "WARNING") -> str:
    level = os.environ.get('SAFELTL_LOG_LEVEL', default).strip().upper()
    return level or default
