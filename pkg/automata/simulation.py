"""
Forward and backward simulation relations and simulation quotients
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, List, Set, Tuple

from automata.buchi import BuchiAutomaton, Transition
from ltl.semantics import Symbol

logger = logging.getLogger(__name__)


class SimulationKind(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class SimulationRelation:
    kind: SimulationKind
    pairs: FrozenSet[Tuple[int, int]]

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def simulators(self, p: int) -> FrozenSet[int]:
        """States r with (p, r) in the relation"""
        return frozenset(r for q, r in self.pairs if q == p)

    def mutual(self, p: int, r: int) -> bool:
        return (p, r) in self.pairs and (r, p) in self.pairs


def successor_table(automaton: BuchiAutomaton) -> Tuple[List[Symbol], Dict[Tuple[int, int], FrozenSet[int]]]:
    """Concrete successor sets indexed by (state, symbol index)"""
    symbols = automaton.symbols()
    post = {
        (q, i): automaton.post(q, s)
        for q in automaton.states for i, s in enumerate(symbols)
    }
    return symbols, post


def forward_simulation(automaton: BuchiAutomaton) -> SimulationRelation:
    """Greatest forward simulation"""
    symbols, post = successor_table(automaton)
    accepting = automaton.accepting
    relation: Set[Tuple[int, int]] = {
        (p, r) for p in automaton.states for r in automaton.states
        if p not in accepting or r in accepting
    }

    changed = True
    while changed:
        changed = False
        for p, r in sorted(relation):
            for i in range(len(symbols)):
                matched = all(
                    any((p2, r2) in relation for r2 in post[(r, i)])
                    for p2 in post[(p, i)]
                )
                if not matched:
                    relation.discard((p, r))
                    changed = True
                    break

    logger.debug("Forward simulation: %d pairs over %d states", len(relation), automaton.num_states)
    return SimulationRelation(SimulationKind.FORWARD, frozenset(relation))


def backward_simulation(automaton: BuchiAutomaton) -> SimulationRelation:
    """Greatest backward simulation"""
    symbols, post = successor_table(automaton)
    pre: Dict[Tuple[int, int], Set[int]] = {
        (q, i): set() for q in automaton.states for i in range(len(symbols))
    }
    for (q, i), targets in post.items():
        for target in targets:
            pre[(target, i)].add(q)

    accepting, initial = automaton.accepting, automaton.initial
    relation: Set[Tuple[int, int]] = {
        (p, r) for p in automaton.states for r in automaton.states
        if (p not in accepting or r in accepting) and (p not in initial or r in initial)
    }

    changed = True
    while changed:
        changed = False
        for p, r in sorted(relation):
            for i in range(len(symbols)):
                matched = all(
                    any((p0, r0) in relation for r0 in pre[(r, i)])
                    for p0 in pre[(p, i)]
                )
                if not matched:
                    relation.discard((p, r))
                    changed = True
                    break

    logger.debug("Backward simulation: %d pairs over %d states", len(relation), automaton.num_states)
    return SimulationRelation(SimulationKind.BACKWARD, frozenset(relation))


def prune_with_simulation(automaton: BuchiAutomaton) -> BuchiAutomaton:
    """Quotient by mutual forward simulation"""
    relation = forward_simulation(automaton)
    representative = {
        q: min(r for r in automaton.states if relation.mutual(q, r))
        for q in automaton.states
    }
    if all(representative[q] == q for q in automaton.states):
        return automaton

    transitions = {
        Transition(representative[t.source], t.label, representative[t.target])
        for t in automaton.transitions
    }
    quotient = BuchiAutomaton(
        automaton.alphabet,
        automaton.num_states,
        frozenset(representative[q] for q in automaton.initial),
        frozenset(representative[q] for q in automaton.accepting),
        frozenset(transitions),
    ).canonical()
    logger.info("Simulation pruning: %s -> %s", automaton.describe(), quotient.describe())
    return quotient
