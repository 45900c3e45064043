"""
Büchi automata with symbolic transition labels
"""

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

from ltl.semantics import Symbol, all_symbols
from utils.validators import IdentifierValidator, ValidationError


@dataclass(frozen=True)
class SymbolicLabel:
    """Conjunction of literals; the empty label matches every symbol"""
    must_true: FrozenSet[str] = field(default_factory=frozenset)
    must_false: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'must_true', frozenset(self.must_true))
        object.__setattr__(self, 'must_false', frozenset(self.must_false))
        clash = self.must_true & self.must_false
        if clash:
            raise ValidationError(f"Label requires {sorted(clash)} both true and false")

    @property
    def is_universal(self) -> bool:
        return not self.must_true and not self.must_false

    def aps(self) -> FrozenSet[str]:
        return self.must_true | self.must_false

    def matches(self, symbol: Symbol) -> bool:
        return self.must_true <= symbol.true_set and not (self.must_false & symbol.true_set)

    def conjoin(self, other: "SymbolicLabel") -> Optional["SymbolicLabel"]:
        """Joint label, or None when unsatisfiable"""
        must_true = self.must_true | other.must_true
        must_false = self.must_false | other.must_false
        if must_true & must_false:
            return None
        return SymbolicLabel(must_true, must_false)

    def concretize(self) -> Symbol:
        return Symbol(self.must_true)

    def sort_key(self) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
        return tuple(sorted(self.must_true)), tuple(sorted(self.must_false))

    def render(self) -> str:
        if self.is_universal:
            return "t"
        literals = [(ap, True) for ap in self.must_true] + [(ap, False) for ap in self.must_false]
        literals.sort()
        return " & ".join(ap if positive else f"!{ap}" for ap, positive in literals)

    @classmethod
    def parse(cls, text: str) -> "SymbolicLabel":
        """Read 't' or a '&'-joined list of literals"""
        text = text.strip()
        if text in ("t", "true", ""):
            return cls()
        must_true, must_false = set(), set()
        for literal in text.split("&"):
            literal = literal.strip()
            negative = literal.startswith("!")
            name = literal[1:].strip() if negative else literal
            is_valid, message = IdentifierValidator.validate_ap_name(name)
            if not is_valid:
                raise ValidationError(f"Bad label literal '{literal}': {message}")
            (must_false if negative else must_true).add(name)
        return cls(frozenset(must_true), frozenset(must_false))

    def __str__(self) -> str:
        return self.render()


class Transition(NamedTuple):
    source: int
    label: SymbolicLabel
    target: int

    def sort_key(self):
        return self.source, self.label.sort_key(), self.target


@dataclass(frozen=True)
class BuchiAutomaton:
    alphabet: Tuple[str, ...]
    num_states: int
    initial: FrozenSet[int]
    accepting: FrozenSet[int]
    transitions: FrozenSet[Transition]

    def __post_init__(self):
        object.__setattr__(self, 'alphabet', tuple(sorted(set(self.alphabet))))
        object.__setattr__(self, 'initial', frozenset(self.initial))
        object.__setattr__(self, 'accepting', frozenset(self.accepting))
        object.__setattr__(self, 'transitions', frozenset(Transition(*t) for t in self.transitions))

        # Validate state ids and label alphabet
        ids = set(self.initial) | set(self.accepting)
        for t in self.transitions:
            ids.update((t.source, t.target))
            unknown = t.label.aps() - set(self.alphabet)
            if unknown:
                raise ValidationError(f"Label '{t.label}' uses APs outside the alphabet: {sorted(unknown)}")
        bad = [i for i in ids if i < 0 or i >= self.num_states]
        if bad:
            raise ValidationError(f"State ids {sorted(bad)} out of range for {self.num_states} states")

    @property
    def states(self) -> range:
        return range(self.num_states)

    @property
    def size(self) -> Tuple[int, int]:
        """(states, transitions)"""
        return self.num_states, len(self.transitions)

    @cached_property
    def outgoing(self) -> Dict[int, List[Transition]]:
        result: Dict[int, List[Transition]] = {q: [] for q in self.states}
        for t in sorted(self.transitions, key=Transition.sort_key):
            result[t.source].append(t)
        return result

    def post(self, state: int, symbol: Symbol) -> FrozenSet[int]:
        """Successors of state on a concrete symbol"""
        return frozenset(t.target for t in self.outgoing[state] if t.label.matches(symbol))

    def symbols(self) -> List[Symbol]:
        return all_symbols(self.alphabet)

    def with_alphabet(self, aps: Iterable[str]) -> "BuchiAutomaton":
        """Same automaton over the union of its alphabet and aps"""
        alphabet = tuple(sorted(set(self.alphabet) | set(aps)))
        if alphabet == self.alphabet:
            return self
        return BuchiAutomaton(alphabet, self.num_states, self.initial, self.accepting, self.transitions)

    def canonical(self) -> "BuchiAutomaton":
        """Renumber reachable states in BFS order from the sorted initial states"""
        numbering: Dict[int, int] = {}
        queue = deque()
        for q in sorted(self.initial):
            numbering[q] = len(numbering)
            queue.append(q)
        while queue:
            q = queue.popleft()
            for t in self.outgoing[q]:
                if t.target not in numbering:
                    numbering[t.target] = len(numbering)
                    queue.append(t.target)

        transitions = {
            Transition(numbering[t.source], t.label, numbering[t.target])
            for t in self.transitions if t.source in numbering
        }
        return BuchiAutomaton(
            self.alphabet,
            len(numbering),
            frozenset(numbering[q] for q in self.initial),
            frozenset(numbering[q] for q in self.accepting if q in numbering),
            frozenset(transitions),
        )

    def to_text(self) -> str:
        """Plain-text form read back by from_text"""
        lines = [
            f"aps: {' '.join(self.alphabet)}".rstrip(),
            f"states: {self.num_states}",
            f"initial: {' '.join(str(q) for q in sorted(self.initial))}".rstrip(),
            f"accepting: {' '.join(str(q) for q in sorted(self.accepting))}".rstrip(),
        ]
        for t in sorted(self.transitions, key=Transition.sort_key):
            lines.append(f'{t.source} "{t.label.render()}" {t.target}')
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BuchiAutomaton":
        """Parse the plain-text automaton format"""
        header: Dict[str, str] = {}
        transitions = set()
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            match = _TRANSITION_LINE.match(line)
            if match:
                transitions.add(Transition(int(match.group(1)),
                                           SymbolicLabel.parse(match.group(2)),
                                           int(match.group(3))))
                continue
            key, sep, value = line.partition(":")
            if not sep or key.strip() not in _HEADER_KEYS:
                raise ValidationError(f"Line {number}: cannot read '{line}'")
            header[key.strip()] = value.strip()

        if "states" not in header:
            raise ValidationError("Automaton text has no 'states:' line")
        try:
            num_states = int(header["states"])
            initial = frozenset(int(x) for x in header.get("initial", "").split())
            accepting = frozenset(int(x) for x in header.get("accepting", "").split())
        except ValueError as e:
            raise ValidationError(f"Bad state id in automaton header: {e}")
        alphabet = tuple(header.get("aps", "").split())
        return cls(alphabet, num_states, initial, accepting, frozenset(transitions))

    def to_dot(self, name: str = "automaton") -> str:
        """Graphviz digraph; accepting states double-circled, initial states with an entry arrow"""
        lines = [f'digraph "{_dot_escape(name)}" {{', "  rankdir=LR;", "  node [shape=circle];"]
        for q in self.states:
            shape = "doublecircle" if q in self.accepting else "circle"
            lines.append(f'  {q} [shape={shape}];')
        for q in sorted(self.initial):
            lines.append(f'  init{q} [shape=point];')
            lines.append(f'  init{q} -> {q};')
        for t in sorted(self.transitions, key=Transition.sort_key):
            lines.append(f'  {t.source} -> {t.target} [label="{_dot_escape(t.label.render())}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def describe(self) -> str:
        states, transitions = self.size
        return f"{states} states, {transitions} transitions"


_TRANSITION_LINE = re.compile(r'^(\d+)\s+"([^"]*)"\s+(\d+)$')
_HEADER_KEYS = {"aps", "states", "initial", "accepting"}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(automaton: BuchiAutomaton, name: str = "automaton") -> str:
    return automaton.to_dot(name)
