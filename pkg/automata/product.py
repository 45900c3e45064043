"""
Synchronized products of Büchi automata
"""

import logging
from typing import Dict, List, Tuple

from automata.buchi import BuchiAutomaton, Transition

logger = logging.getLogger(__name__)


def unify_alphabets(a: BuchiAutomaton, b: BuchiAutomaton) -> Tuple[BuchiAutomaton, BuchiAutomaton]:
    """Both automata over the union of their alphabets"""
    aps = set(a.alphabet) | set(b.alphabet)
    return a.with_alphabet(aps), b.with_alphabet(aps)


def product(a: BuchiAutomaton, b: BuchiAutomaton) -> BuchiAutomaton:
    """Intersection automaton; state (p, q, track) accepts on track 0 when p accepts"""
    a, b = unify_alphabets(a, b)

    numbering: Dict[Tuple[int, int, int], int] = {}
    queue: List[Tuple[int, int, int]] = []
    for p in sorted(a.initial):
        for q in sorted(b.initial):
            numbering[(p, q, 0)] = len(numbering)
            queue.append((p, q, 0))

    transitions = set()
    index = 0
    while index < len(queue):
        p, q, track = queue[index]
        index += 1
        if track == 0 and p in a.accepting:
            next_track = 1
        elif track == 1 and q in b.accepting:
            next_track = 0
        else:
            next_track = track

        for ta in a.outgoing[p]:
            for tb in b.outgoing[q]:
                label = ta.label.conjoin(tb.label)
                if label is None:
                    continue
                target = (ta.target, tb.target, next_track)
                if target not in numbering:
                    numbering[target] = len(numbering)
                    queue.append(target)
                transitions.add(Transition(numbering[(p, q, track)], label, numbering[target]))

    accepting = frozenset(
        i for (p, q, track), i in numbering.items() if track == 0 and p in a.accepting
    )
    initial = frozenset(i for (p, q, track), i in numbering.items()
                        if p in a.initial and q in b.initial and track == 0)
    result = BuchiAutomaton(a.alphabet, len(numbering), initial, accepting, frozenset(transitions))
    logger.debug("Product of %s and %s has %s", a.describe(), b.describe(), result.describe())
    return result
