"""
Lasso acceptance and accepting-lasso extraction
"""

import logging
from collections import deque
from typing import FrozenSet, List, Optional, Set, Tuple

import networkx as nx

from automata.buchi import BuchiAutomaton, Transition
from ltl.semantics import LassoWord

logger = logging.getLogger(__name__)


def _has_cycle(graph: nx.DiGraph, component: Set) -> bool:
    if len(component) > 1:
        return True
    node = next(iter(component))
    return graph.has_edge(node, node)


def accepts_lasso(automaton: BuchiAutomaton, word: LassoWord) -> bool:
    """Whether some run over prefix . loop^w visits an accepting state infinitely often"""
    if not automaton.accepting:
        return False

    current: Set[int] = set(automaton.initial)
    for symbol in word.prefix:
        current = {r for q in current for r in automaton.post(q, symbol)}
        if not current:
            return False

    # Runs over the loop, tracked as (state, loop index) pairs
    loop_len = len(word.loop)
    graph = nx.DiGraph()
    queue = deque((q, 0) for q in sorted(current))
    graph.add_nodes_from(queue)
    while queue:
        q, i = queue.popleft()
        for r in automaton.post(q, word.loop[i]):
            pair = (r, (i + 1) % loop_len)
            if pair not in graph:
                queue.append(pair)
            graph.add_edge((q, i), pair)

    for component in nx.strongly_connected_components(graph):
        if _has_cycle(graph, component) and any(q in automaton.accepting for q, _ in component):
            return True
    return False


def _state_graph(automaton: BuchiAutomaton) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(automaton.states)
    graph.add_edges_from((t.source, t.target) for t in automaton.transitions)
    return graph


def accepting_cycle_states(automaton: BuchiAutomaton) -> FrozenSet[int]:
    """Reachable accepting states lying on a cycle"""
    graph = _state_graph(automaton)
    reachable = set(automaton.initial)
    for q in automaton.initial:
        reachable |= nx.descendants(graph, q)

    goals = set()
    for component in nx.strongly_connected_components(graph.subgraph(reachable)):
        if _has_cycle(graph, component):
            goals |= {q for q in component if q in automaton.accepting}
    return frozenset(goals)


def _shortest_cycle(automaton: BuchiAutomaton, start: int, component: Set[int]) -> List[Transition]:
    parent = {}
    queue = deque()
    for t in automaton.outgoing[start]:
        if t.target == start:
            return [t]
        if t.target in component and t.target not in parent:
            parent[t.target] = t
            queue.append(t.target)

    while queue:
        q = queue.popleft()
        for t in automaton.outgoing[q]:
            if t.target == start:
                path = [t]
                while path[-1].source != start:
                    path.append(parent[path[-1].source])
                path.reverse()
                return path
            if t.target in component and t.target not in parent:
                parent[t.target] = t
                queue.append(t.target)

    raise RuntimeError(f"State {start} lies on no cycle")


def _lazy_prefix(automaton: BuchiAutomaton, goals: FrozenSet[int],
                 productive: Set[int]) -> Tuple[int, List[Transition]]:
    # Depth-first in label order, so the prefix prefers edges asserting fewer atoms
    for init in sorted(automaton.initial):
        if init not in productive:
            continue
        if init in goals:
            return init, []
        visited = {init}
        path: List[Transition] = []
        stack = [iter(automaton.outgoing[init])]
        while stack:
            t = next(stack[-1], None)
            if t is None:
                stack.pop()
                if path:
                    path.pop()
                continue
            if t.target in visited or t.target not in productive:
                continue
            visited.add(t.target)
            path.append(t)
            if t.target in goals:
                return t.target, path
            stack.append(iter(automaton.outgoing[t.target]))
    raise RuntimeError("No initial state reaches an accepting cycle")


def find_accepting_lasso(automaton: BuchiAutomaton) -> Optional[LassoWord]:
    """An accepted lasso word, or None when the language is empty"""
    goals = accepting_cycle_states(automaton)
    if not goals:
        return None

    graph = _state_graph(automaton)
    productive = set(goals)
    reverse = graph.reverse(copy=True)
    for goal in goals:
        productive |= nx.descendants(reverse, goal)

    target, prefix = _lazy_prefix(automaton, goals, productive)
    component = next(c for c in nx.strongly_connected_components(graph) if target in c)
    cycle = _shortest_cycle(automaton, target, component)

    word = LassoWord(tuple(t.label.concretize() for t in prefix),
                     tuple(t.label.concretize() for t in cycle))
    logger.debug("Accepting lasso through state %d: %s", target, word)
    return word


def is_empty(automaton: BuchiAutomaton) -> bool:
    return not accepting_cycle_states(automaton)
