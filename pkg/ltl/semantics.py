"""
Symbols, lasso words and exact LTL evaluation over ultimately periodic words
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Mapping, Sequence, Tuple

from ltl.formula import (
    And, Atom, Eventually, FalseConst, Formula, Globally, Iff, Implies, Next, Not, Or,
    Release, TrueConst, Until, subformulas,
)
from utils.validators import ValidationError


@dataclass(frozen=True)
class Symbol:
    """The set of atomic propositions holding at one instant"""
    true_set: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, 'true_set', frozenset(self.true_set))

    @classmethod
    def of(cls, *names: str) -> "Symbol":
        return cls(frozenset(names))

    def holds(self, ap: str) -> bool:
        return ap in self.true_set

    def rename(self, substitution: Mapping[str, str]) -> "Symbol":
        return Symbol(frozenset(substitution.get(ap, ap) for ap in self.true_set))

    def with_atom(self, ap: str, value: bool) -> "Symbol":
        return Symbol(self.true_set | {ap} if value else self.true_set - {ap})

    def render(self, alphabet: Sequence[str]) -> str:
        """Conjunction of literals over alphabet, e.g. 'a & !b'; other atoms are left out"""
        aps = sorted(set(alphabet))
        if not aps:
            return "t"
        return " & ".join(ap if ap in self.true_set else f"!{ap}" for ap in aps)

    def __str__(self) -> str:
        return "{" + ", ".join(sorted(self.true_set)) + "}"


@dataclass(frozen=True)
class LassoWord:
    """The infinite word prefix . loop^w"""
    prefix: Tuple[Symbol, ...]
    loop: Tuple[Symbol, ...]

    def __post_init__(self):
        object.__setattr__(self, 'prefix', tuple(self.prefix))
        object.__setattr__(self, 'loop', tuple(self.loop))
        if not self.loop:
            raise ValidationError("Lasso loop must contain at least one symbol")

    @property
    def positions(self) -> int:
        return len(self.prefix) + len(self.loop)

    @property
    def loop_start(self) -> int:
        return len(self.prefix)

    @property
    def symbols(self) -> Tuple[Symbol, ...]:
        return self.prefix + self.loop

    def successor(self, position: int) -> int:
        """Next position, wrapping the last loop position to the loop start"""
        return position + 1 if position + 1 < self.positions else self.loop_start

    def symbol_at(self, index: int) -> Symbol:
        """Symbol at any index of the infinite word"""
        if index < len(self.prefix):
            return self.prefix[index]
        return self.loop[(index - len(self.prefix)) % len(self.loop)]

    def aps(self) -> Tuple[str, ...]:
        return tuple(sorted(set().union(*(s.true_set for s in self.symbols))))

    def rename(self, substitution: Mapping[str, str]) -> "LassoWord":
        return LassoWord(tuple(s.rename(substitution) for s in self.prefix),
                         tuple(s.rename(substitution) for s in self.loop))

    def unroll(self) -> "LassoWord":
        """Same word with one loop iteration moved into the prefix"""
        return LassoWord(self.prefix + self.loop, self.loop)

    def render(self, alphabet: Sequence[str]) -> str:
        """Literal sequence with the loop written as ( ... )^w"""
        parts = [s.render(alphabet) for s in self.prefix]
        loop = "; ".join(s.render(alphabet) for s in self.loop)
        parts.append(f"({loop})^w")
        return "; ".join(parts[:-1]) + (" " if self.prefix else "") + parts[-1]

    def __str__(self) -> str:
        prefix = ", ".join(str(s) for s in self.prefix)
        loop = ", ".join(str(s) for s in self.loop)
        return f"[{prefix}]([{loop}])^w"


def all_symbols(alphabet: Sequence[str]) -> List[Symbol]:
    """Every symbol over alphabet; first AP most significant, absent before present"""
    aps = sorted(alphabet)
    symbols = []
    for bits in itertools.product((False, True), repeat=len(aps)):
        symbols.append(Symbol(frozenset(ap for ap, bit in zip(aps, bits) if bit)))
    return symbols


def enumerate_lassos(alphabet: Sequence[str], max_prefix: int, max_loop: int) -> Iterator[LassoWord]:
    """All lasso words with |prefix| <= max_prefix and 1 <= |loop| <= max_loop"""
    symbols = all_symbols(alphabet)
    for prefix_len in range(max_prefix + 1):
        for prefix in itertools.product(symbols, repeat=prefix_len):
            for loop_len in range(1, max_loop + 1):
                for loop in itertools.product(symbols, repeat=loop_len):
                    yield LassoWord(prefix, loop)


def _solve_loop(word: LassoWord, step: Callable[[int, bool], bool], seed: bool) -> List[bool]:
    # Two backward sweeps over the loop reach the fixpoint; prefix follows in one
    n = word.positions
    start = word.loop_start
    values = [seed] * n
    for _ in range(2):
        for i in range(n - 1, start - 1, -1):
            following = values[start] if i == n - 1 else values[i + 1]
            values[i] = step(i, following)
    for i in range(start - 1, -1, -1):
        values[i] = step(i, values[i + 1])
    return values


def satisfaction_table(f: Formula, word: LassoWord) -> Dict[Formula, List[bool]]:
    """Truth value of every subformula of f at every lasso position"""
    n = word.positions
    symbols = word.symbols
    table: Dict[Formula, List[bool]] = {}

    for g in subformulas(f):
        if isinstance(g, TrueConst):
            values = [True] * n
        elif isinstance(g, FalseConst):
            values = [False] * n
        elif isinstance(g, Atom):
            values = [symbols[i].holds(g.name) for i in range(n)]
        elif isinstance(g, Not):
            values = [not v for v in table[g.child]]
        elif isinstance(g, Next):
            child = table[g.child]
            values = [child[word.successor(i)] for i in range(n)]
        elif isinstance(g, Eventually):
            child = table[g.child]
            values = _solve_loop(word, lambda i, nxt: child[i] or nxt, False)
        elif isinstance(g, Globally):
            child = table[g.child]
            values = _solve_loop(word, lambda i, nxt: child[i] and nxt, True)
        else:
            left, right = table[g.left], table[g.right]
            if isinstance(g, And):
                values = [a and b for a, b in zip(left, right)]
            elif isinstance(g, Or):
                values = [a or b for a, b in zip(left, right)]
            elif isinstance(g, Implies):
                values = [(not a) or b for a, b in zip(left, right)]
            elif isinstance(g, Iff):
                values = [a == b for a, b in zip(left, right)]
            elif isinstance(g, Until):
                values = _solve_loop(word, lambda i, nxt: right[i] or (left[i] and nxt), False)
            elif isinstance(g, Release):
                values = _solve_loop(word, lambda i, nxt: right[i] and (left[i] or nxt), True)
            else:
                raise TypeError(f"Unknown formula node {type(g).__name__}")
        table[g] = values

    return table


def eval_lasso(f: Formula, word: LassoWord) -> bool:
    """Whether prefix . loop^w satisfies f at position 0"""
    return satisfaction_table(f, word)[f][0]
