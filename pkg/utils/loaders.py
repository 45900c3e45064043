"""
Readers for rule files, task datasets, formula files and transcripts
"""

import logging
from pathlib import Path
from typing import List, Optional, Union

from agents.backends import TranscriptBook
from ltl.formula import Formula
from ltl.parser import parse
from models import Rule, RuleSet, TaskEntry
from utils.validators import LTLSyntaxError, RecordValidator, RuleValidator, ValidationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
ENTRY_SEPARATOR = "---"


def _read(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"Cannot read {path}: {e}")


def parse_rules(text: str, source: str = "<rules>") -> RuleSet:
    """
    One rule per line as `name | priority | formula`, or `name | formula`
    with priority 0. Blank lines and `#` comments are skipped.
    """
    ruleset = RuleSet()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        fields = [part.strip() for part in line.split("|", 2)]
        if len(fields) < 2:
            raise ValidationError(f"{source}:{number}: expected 'name | priority | formula'")
        # The formula may itself contain |; only an integer middle field is a priority
        if len(fields) == 3 and RuleValidator.validate_priority(fields[1])[0]:
            name, priority, ltl_text = fields
        else:
            name, ltl_text = (part.strip() for part in line.split("|", 1))
            priority = "0"

        errors = RecordValidator.validate_rule_record(name, priority, ltl_text)
        if errors:
            raise ValidationError(f"{source}:{number}: {'; '.join(errors)}")
        try:
            formula = parse(ltl_text)
        except LTLSyntaxError as e:
            raise ValidationError(f"{source}:{number}: rule '{name}' does not parse: {e}")
        ruleset.add(Rule(name, formula, int(priority)))

    if not len(ruleset):
        raise ValidationError(f"{source}: no rules found")
    logger.info("Loaded %d rule(s) from %s", len(ruleset), source)
    return ruleset


def load_rules(path: PathLike) -> RuleSet:
    return parse_rules(_read(path), str(path))


def _parse_entry(block: str, source: str) -> Optional[TaskEntry]:
    fields = {"id": [], "task": [], "env": []}
    current = None
    for raw in block.splitlines():
        stripped = raw.strip()
        if current is None and (not stripped or stripped.startswith("#")):
            continue
        key, sep, rest = raw.partition(":")
        if sep and key.strip().lower() in fields and not raw[:1].isspace():
            current = key.strip().lower()
            fields[current] = [rest.strip()] if rest.strip() else []
        elif current is not None:
            fields[current].append(stripped)
        else:
            raise ValidationError(f"{source}: unexpected line outside a field: {stripped}")

    if not any(fields.values()):
        return None
    entry_id = " ".join(fields["id"]).strip()
    task = "\n".join(fields["task"]).strip()
    env = "\n".join(fields["env"]).strip()
    errors = RecordValidator.validate_task_record(entry_id, task)
    if errors:
        raise ValidationError(f"{source}: entry '{entry_id}': {'; '.join(errors)}")
    return TaskEntry(entry_id, task, env)


def parse_dataset(text: str, source: str = "<dataset>") -> List[TaskEntry]:
    """
    Entries separated by `---` lines. Each entry has an `id:` line, a `task:`
    block and an optional `env:` block; continuation lines are indented.
    """
    entries: List[TaskEntry] = []
    block: List[str] = []
    for raw in text.splitlines() + [ENTRY_SEPARATOR]:
        if raw.strip() == ENTRY_SEPARATOR:
            entry = _parse_entry("\n".join(block), source)
            if entry is not None:
                entries.append(entry)
            block = []
        else:
            block.append(raw)

    ids = [entry.entry_id for entry in entries]
    duplicates = sorted({i for i in ids if ids.count(i) > 1})
    if duplicates:
        raise ValidationError(f"{source}: duplicate entry ids: {', '.join(duplicates)}")
    if not entries:
        raise ValidationError(f"{source}: no entries found")
    return entries


def load_dataset(path: PathLike) -> List[TaskEntry]:
    return parse_dataset(_read(path), str(path))


def load_formula_file(path: PathLike) -> Formula:
    """A single formula; `#` comment lines are ignored"""
    lines = [line for line in _read(path).splitlines() if not line.strip().startswith("#")]
    text = " ".join(line.strip() for line in lines if line.strip())
    if not text:
        raise ValidationError(f"{path}: no formula found")
    return parse(text)


def load_transcripts(path: PathLike) -> TranscriptBook:
    return TranscriptBook.from_text(_read(path))
