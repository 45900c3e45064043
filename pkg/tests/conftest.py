"""
Shared fixtures and builders
"""

import random
from pathlib import Path

import pytest

from agents.backends import ScriptedBackend, ScriptedTranscript
from automata.buchi import BuchiAutomaton, SymbolicLabel, Transition
from config import PipelineConfig
from ltl.formula import (
    And, Atom, Eventually, Formula, Globally, Iff, Implies, Next, Not, Or, Until,
)
from ltl.parser import parse
from utils.loaders import load_dataset, load_rules, load_transcripts

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ROUTE_TASK = ("F(straight_200m) & X(G(right_turn_Maple_St -> F(straight_500m & "
              "X(left_turn_Oak_St & F(straight_300m)))))")
ROUTE_RULE = ("G((straight_500m | right_turn) -> (right_turn -> straight_500m -> left_turn)) "
              "-> G(straight_1km & arrive_destination)")


def random_formula(rng: random.Random, aps, depth: int) -> Formula:
    """Random formula without Release over aps"""
    if depth == 0 or rng.random() < 0.25:
        return Atom(rng.choice(aps))
    unary = (Not, Next, Eventually, Globally)
    binary = (And, Or, Implies, Iff, Until)
    if rng.random() < 0.45:
        return rng.choice(unary)(random_formula(rng, aps, depth - 1))
    return rng.choice(binary)(random_formula(rng, aps, depth - 1), random_formula(rng, aps, depth - 1))


def random_automaton(rng: random.Random, num_states: int, aps=("a",)) -> BuchiAutomaton:
    """Random automaton whose edges carry t or a single literal"""
    labels = [SymbolicLabel()]
    for ap in aps:
        labels += [SymbolicLabel.parse(ap), SymbolicLabel.parse(f"!{ap}")]
    transitions = {
        Transition(p, label, q)
        for p in range(num_states) for label in labels for q in range(num_states)
        if rng.random() < 0.3
    }
    initial = {q for q in range(num_states) if rng.random() < 0.4} or {0}
    accepting = {q for q in range(num_states) if rng.random() < 0.4}
    return BuchiAutomaton(aps, num_states, initial, accepting, transitions)


def scripted(*replies) -> ScriptedBackend:
    """Backend from (template id, reply) pairs"""
    return ScriptedBackend(ScriptedTranscript(tuple(replies)))


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def route_task():
    return parse(ROUTE_TASK)


@pytest.fixture
def route_rule():
    return parse(ROUTE_RULE)


@pytest.fixture
def traffic_rules():
    return load_rules(FIXTURES / "rules" / "traffic.rules")


@pytest.fixture
def traffic_dataset():
    return load_dataset(FIXTURES / "datasets" / "traffic_samples.txt")


@pytest.fixture
def running_example_entry():
    return load_dataset(FIXTURES / "datasets" / "running_example.txt")[0]


@pytest.fixture
def running_example_transcript():
    return load_transcripts(FIXTURES / "transcripts" / "running_example.txt")


@pytest.fixture
def config():
    return PipelineConfig()


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("SAFELTL_MAX_ITERATIONS", "SAFELTL_SYNTAX_RETRIES", "SAFELTL_PARALLEL_RULES",
                 "SAFELTL_MINIMIZE", "SAFELTL_BACKEND", "SAFELTL_ALIGNER", "SAFELTL_TEMPERATURE",
                 "SAFELTL_SEED", "SAFELTL_LLM_ENDPOINT", "SAFELTL_LLM_TOKEN", "SAFELTL_LLM_MODEL"):
        monkeypatch.delenv(name, raising=False)
