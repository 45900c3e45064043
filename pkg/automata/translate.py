"""
LTL to Büchi automaton translation: expand-node tableau to a generalized
automaton, then counter degeneralization.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, List, Sequence, Set, Tuple

from automata.buchi import BuchiAutomaton, SymbolicLabel, Transition
from ltl.formula import (
    And, Atom, Eventually, FalseConst, Formula, Globally, Next, Not, Or, Release, TrueConst,
    Until, atomic_propositions, render, subformulas, to_nnf,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Node:
    label: SymbolicLabel
    obligations: FrozenSet[Formula]
    fulfilled: FrozenSet[int]

    def sort_key(self):
        return (self.label.sort_key(),
                tuple(sorted(render(f) for f in self.obligations)),
                tuple(sorted(self.fulfilled)))


class _Tableau:
    """Expands NNF obligations into tableau nodes"""

    def __init__(self, eventualities: Sequence[Formula]):
        self.eventualities = list(eventualities)
        self._cache: Dict[FrozenSet[Formula], List[_Node]] = {}

    def expand(self, formulas: FrozenSet[Formula]) -> List[_Node]:
        if formulas in self._cache:
            return self._cache[formulas]

        nodes: Dict[_Node, None] = {}
        start = tuple(sorted(formulas, key=render))
        stack: List[Tuple[Tuple[Formula, ...], FrozenSet[Formula], FrozenSet[Formula]]] = [
            (start, frozenset(), frozenset())
        ]
        while stack:
            todo, old, nxt = stack.pop()
            if not todo:
                nodes[self._close(old, nxt)] = None
                continue

            f, rest = todo[0], todo[1:]
            if f in old:
                stack.append((rest, old, nxt))
                continue
            old = old | {f}

            if isinstance(f, TrueConst):
                stack.append((rest, old, nxt))
            elif isinstance(f, FalseConst):
                continue
            elif isinstance(f, Atom):
                if Not(f) not in old:
                    stack.append((rest, old, nxt))
            elif isinstance(f, Not):
                if f.child not in old:
                    stack.append((rest, old, nxt))
            elif isinstance(f, And):
                stack.append((rest + (f.left, f.right), old, nxt))
            elif isinstance(f, Or):
                stack.append((rest + (f.right,), old, nxt))
                stack.append((rest + (f.left,), old, nxt))
            elif isinstance(f, Next):
                stack.append((rest, old, nxt | {f.child}))
            elif isinstance(f, Until):
                stack.append((rest + (f.left,), old, nxt | {f}))
                stack.append((rest + (f.right,), old, nxt))
            elif isinstance(f, Eventually):
                stack.append((rest, old, nxt | {f}))
                stack.append((rest + (f.child,), old, nxt))
            elif isinstance(f, Release):
                stack.append((rest + (f.right,), old, nxt | {f}))
                stack.append((rest + (f.left, f.right), old, nxt))
            elif isinstance(f, Globally):
                stack.append((rest + (f.child,), old, nxt | {f}))
            else:
                raise TypeError(f"Formula not in negation normal form: {render(f)}")

        result = sorted(nodes, key=_Node.sort_key)
        self._cache[formulas] = result
        return result

    def _close(self, old: FrozenSet[Formula], nxt: FrozenSet[Formula]) -> _Node:
        must_true = frozenset(f.name for f in old if isinstance(f, Atom))
        must_false = frozenset(f.child.name for f in old if isinstance(f, Not))
        fulfilled = frozenset(
            i for i, ev in enumerate(self.eventualities)
            if ev not in old or _goal(ev) in old
        )
        return _Node(SymbolicLabel(must_true, must_false), nxt, fulfilled)


def _goal(eventuality: Formula) -> Formula:
    return eventuality.right if isinstance(eventuality, Until) else eventuality.child


@lru_cache(maxsize=512)
def translate(f: Formula) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the words satisfying f"""
    nnf = to_nnf(f)
    eventualities = [g for g in subformulas(nnf) if isinstance(g, (Until, Eventually))]
    tableau = _Tableau(eventualities)

    # Generalized automaton: state 0 is the entry point, nodes follow
    node_ids: Dict[_Node, int] = {}
    nodes: List[_Node] = []
    edges: Set[Transition] = set()

    def node_id(node: _Node) -> int:
        if node not in node_ids:
            node_ids[node] = len(nodes) + 1
            nodes.append(node)
        return node_ids[node]

    for node in tableau.expand(frozenset([nnf])):
        edges.add(Transition(0, node.label, node_id(node)))
    index = 0
    while index < len(nodes):
        source = nodes[index]
        for node in tableau.expand(source.obligations):
            edges.add(Transition(index + 1, node.label, node_id(node)))
        index += 1

    acceptance_sets = [
        frozenset(node_ids[n] for n in nodes if i in n.fulfilled)
        for i in range(len(eventualities))
    ]
    automaton = _degeneralize(
        atomic_propositions(f), len(nodes) + 1, edges, acceptance_sets
    ).canonical()
    logger.debug("Translated %s into %s", render(f), automaton.describe())
    return automaton


def _degeneralize(alphabet: Tuple[str, ...], num_states: int, edges: Set[Transition],
                  acceptance_sets: List[FrozenSet[int]]) -> BuchiAutomaton:
    """Counter construction; without acceptance sets every tableau node accepts"""
    if not acceptance_sets:
        return BuchiAutomaton(alphabet, num_states, frozenset([0]),
                              frozenset(range(1, num_states)), frozenset(edges))

    k = len(acceptance_sets)
    numbering: Dict[Tuple[int, int], int] = {(0, 0): 0}
    queue = [(0, 0)]
    outgoing: Dict[int, List[Transition]] = {}
    for e in edges:
        outgoing.setdefault(e.source, []).append(e)

    transitions: Set[Transition] = set()
    index = 0
    while index < len(queue):
        q, counter = queue[index]
        index += 1
        next_counter = (counter + 1) % k if q in acceptance_sets[counter] else counter
        for e in outgoing.get(q, []):
            target = (e.target, next_counter)
            if target not in numbering:
                numbering[target] = len(numbering)
                queue.append(target)
            transitions.add(Transition(numbering[(q, counter)], e.label, numbering[target]))

    accepting = frozenset(
        i for (q, counter), i in numbering.items()
        if counter == 0 and q in acceptance_sets[0]
    )
    return BuchiAutomaton(alphabet, len(numbering), frozenset([0]), accepting, frozenset(transitions))
