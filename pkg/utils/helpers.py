"""
Utility functions and helpers for the safeltl toolkit
"""

import re
from typing import Any, Optional

FENCE_PATTERN = re.compile(r"```[A-Za-z0-9_-]*\s*\n?(.*?)```", re.DOTALL)
FORMULA_PREFIX_PATTERN = re.compile(
    r"^\s*(?:final\s+)?(?:ltl)(?:[\s_-]*\d+)?(?:\s+formula)?\s*:\s*", re.IGNORECASE)
EQUALITY_ATOM_PATTERN = re.compile(r"\b([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([A-Za-z0-9_]+)\b")


def safe_int(value: Any, default: int = 0) -> int:
    """Safely convert value to integer"""
    try:
        return int(value) if value is not None else default
    except (ValueError, TypeError):
        return default


def safe_float(value: Any, default: float = 0.0) -> float:
    """Safely convert value to float"""
    try:
        return float(value) if value is not None else default
    except (ValueError, TypeError):
        return default


def parse_bool(value: Any, default: bool = False) -> bool:
    """Interpret common truthy strings"""
    if value is None:
        return default
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ('1', 'true', 'yes', 'on'):
        return True
    if text in ('0', 'false', 'no', 'off'):
        return False
    return default


def truncate_string(text: str, max_length: int, suffix: str = "...") -> str:
    """Truncate string to maximum length with optional suffix"""
    if not text:
        return ""
    if len(text) <= max_length:
        return text
    return text[:max_length - len(suffix)] + suffix


def format_ms(milliseconds: float) -> str:
    """Format a duration in whole milliseconds"""
    return str(int(round(milliseconds)))


def format_percentage(fraction: float, digits: int = 1) -> str:
    """Format a 0..1 fraction as a percentage"""
    return f"{fraction * 100:.{digits}f}%"


def format_optional_number(value: Optional[float], digits: int = 2) -> str:
    """Format a number or a dash when absent"""
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


def normalize_equality_atoms(text: str) -> str:
    """Turn 'location = start' into the single atom 'location_start'"""
    return EQUALITY_ATOM_PATTERN.sub(lambda m: f"{m.group(1)}_{m.group(2)}", text)


def clean_llm_reply(text: str) -> str:
    """Extract the formula line from a model reply"""
    if not text:
        return ""

    # Prefer fenced content
    fenced = FENCE_PATTERN.search(text)
    if fenced:
        text = fenced.group(1)

    lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
    if not lines:
        return ""

    prefixed = [line for line in lines if FORMULA_PREFIX_PATTERN.match(line)]
    if prefixed:
        candidate = FORMULA_PREFIX_PATTERN.sub("", prefixed[-1], count=1)
    else:
        candidate = lines[-1]

    candidate = candidate.strip().strip('`"\'').strip()
    if candidate.endswith('.'):
        candidate = candidate[:-1].rstrip()
    return normalize_equality_atoms(candidate)
