"""
Simulation relations and simulation quotients
"""

import itertools

from automata.buchi import BuchiAutomaton, SymbolicLabel, Transition
from automata.emptiness import accepts_lasso
from automata.simulation import (
    SimulationKind, backward_simulation, forward_simulation, prune_with_simulation,
)
from automata.translate import translate
from ltl.semantics import enumerate_lassos
from tests.conftest import random_automaton, random_formula


def duplicated_branch():
    """Two interchangeable accepting sinks reached on a"""
    t, a = SymbolicLabel(), SymbolicLabel.parse("a")
    return BuchiAutomaton(
        ("a",), 3, {0}, {1, 2},
        {Transition(0, a, 1), Transition(0, a, 2), Transition(1, t, 1), Transition(2, t, 2)},
    )


def gf_a():
    a, not_a = SymbolicLabel.parse("a"), SymbolicLabel.parse("!a")
    return BuchiAutomaton(
        ("a",), 2, {0}, {1},
        {Transition(0, not_a, 0), Transition(0, a, 1), Transition(1, not_a, 0), Transition(1, a, 1)},
    )


def is_forward_simulation(automaton, relation):
    """Accepting states are simulated by accepting states; every move is matched forward"""
    symbols = automaton.symbols()
    for p, r in relation:
        if p in automaton.accepting and r not in automaton.accepting:
            return False
        for symbol in symbols:
            for p2 in automaton.post(p, symbol):
                if not any((p2, r2) in relation for r2 in automaton.post(r, symbol)):
                    return False
    return True


def is_backward_simulation(automaton, relation):
    """As forward, also keeping initial states, with moves matched from predecessors"""
    symbols = automaton.symbols()

    def pre(q, symbol):
        return {q0 for q0 in automaton.states if q in automaton.post(q0, symbol)}

    for p, r in relation:
        if p in automaton.accepting and r not in automaton.accepting:
            return False
        if p in automaton.initial and r not in automaton.initial:
            return False
        for symbol in symbols:
            for p0 in pre(p, symbol):
                if not any((p0, r0) in relation for r0 in pre(r, symbol)):
                    return False
    return True


def largest_relation(automaton, is_simulation):
    """Union of every relation over the states that passes is_simulation"""
    pairs = list(itertools.product(automaton.states, repeat=2))
    largest = set()
    for mask in range(1 << len(pairs)):
        relation = {pair for k, pair in enumerate(pairs) if mask >> k & 1}
        if not relation <= largest and is_simulation(automaton, relation):
            largest |= relation
    return frozenset(largest)


def oracle_automata(rng):
    sizes = [1, 2, 2, 3, 3, 3] * 4 + [4, 4]
    return [random_automaton(rng, n) for n in sizes]


class TestForwardSimulation:
    def test_accepting_state_simulates_its_twin(self):
        relation = forward_simulation(gf_a())
        assert relation.kind == SimulationKind.FORWARD
        assert relation.pairs == {(0, 0), (0, 1), (1, 1)}
        assert relation.simulators(0) == {0, 1}
        assert not relation.mutual(0, 1)

    def test_interchangeable_states_are_mutual(self):
        relation = forward_simulation(duplicated_branch())
        assert relation.mutual(1, 2)
        assert (1, 0) not in relation

    def test_reflexive(self, rng):
        for _ in range(5):
            automaton = translate(random_formula(rng, ["a", "b"], 3))
            relation = forward_simulation(automaton)
            assert all((q, q) in relation for q in automaton.states)

    def test_matches_brute_force_on_random_automata(self, rng):
        for automaton in oracle_automata(rng):
            relation = forward_simulation(automaton)
            assert is_forward_simulation(automaton, relation.pairs)
            assert relation.pairs == largest_relation(automaton, is_forward_simulation)


class TestBackwardSimulation:
    def test_reflexive_and_respects_initial_states(self):
        automaton = duplicated_branch()
        relation = backward_simulation(automaton)
        assert relation.kind == SimulationKind.BACKWARD
        assert all((q, q) in relation for q in automaton.states)
        assert (0, 1) not in relation
        assert relation.mutual(1, 2)

    def test_matches_brute_force_on_random_automata(self, rng):
        for automaton in oracle_automata(rng):
            relation = backward_simulation(automaton)
            assert is_backward_simulation(automaton, relation.pairs)
            assert relation.pairs == largest_relation(automaton, is_backward_simulation)


class TestPruning:
    def test_merges_mutually_similar_states(self):
        pruned = prune_with_simulation(duplicated_branch())
        assert pruned.num_states == 2
        assert len(pruned.transitions) == 2

    def test_unchanged_when_nothing_merges(self):
        automaton = gf_a()
        assert prune_with_simulation(automaton) is automaton

    def test_language_preserved(self, rng):
        words = list(enumerate_lassos(["a", "b"], 1, 2))
        for _ in range(10):
            automaton = translate(random_formula(rng, ["a", "b"], 3))
            pruned = prune_with_simulation(automaton)
            assert pruned.num_states <= automaton.num_states
            for word in words:
                assert accepts_lasso(pruned, word) == accepts_lasso(automaton, word)
