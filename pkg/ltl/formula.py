"""
LTL syntax tree, rendering and structural rewrites
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple


@dataclass(frozen=True)
class Formula:
    """Base class of the LTL syntax tree"""

    def children(self) -> Tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class TrueConst(Formula):
    pass


@dataclass(frozen=True)
class FalseConst(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Unary(Formula):
    child: Formula

    def children(self) -> Tuple[Formula, ...]:
        return (self.child,)


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula

    def children(self) -> Tuple[Formula, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Not(Unary):
    pass


@dataclass(frozen=True)
class Next(Unary):
    pass


@dataclass(frozen=True)
class Eventually(Unary):
    pass


@dataclass(frozen=True)
class Globally(Unary):
    pass


@dataclass(frozen=True)
class And(Binary):
    pass


@dataclass(frozen=True)
class Or(Binary):
    pass


@dataclass(frozen=True)
class Implies(Binary):
    pass


@dataclass(frozen=True)
class Iff(Binary):
    pass


@dataclass(frozen=True)
class Until(Binary):
    pass


@dataclass(frozen=True)
class Release(Binary):
    """Dual of Until; produced by to_nnf only, never by the parser"""
    pass


TRUE = TrueConst()
FALSE = FalseConst()

UNARY_SYMBOLS = {'!': Not, 'X': Next, 'F': Eventually, 'G': Globally}
BINARY_SYMBOLS = {'&': And, 'U': Until, '|': Or, '->': Implies, '<->': Iff}
SYMBOL_OF = {cls: sym for sym, cls in {**UNARY_SYMBOLS, **BINARY_SYMBOLS}.items()}

# Binding strength, tightest last
BINARY_PRECEDENCE = {'<->': 1, '->': 2, '|': 3, 'U': 4, '&': 5}
RIGHT_ASSOCIATIVE = {'->', 'U'}
UNARY_PRECEDENCE = 6
ATOMIC_PRECEDENCE = 7


def _precedence(f: Formula) -> int:
    if isinstance(f, Release):
        # Printed as a negated Until
        return UNARY_PRECEDENCE
    if isinstance(f, Binary):
        return BINARY_PRECEDENCE[SYMBOL_OF[type(f)]]
    if isinstance(f, Unary):
        return UNARY_PRECEDENCE
    return ATOMIC_PRECEDENCE


def render(f: Formula) -> str:
    """Render a formula with minimal parentheses"""
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Release):
        return render(Not(Until(Not(f.left), Not(f.right))))

    if isinstance(f, Unary):
        symbol = SYMBOL_OF[type(f)]
        inner = render(f.child)
        if _precedence(f.child) < UNARY_PRECEDENCE:
            return f"{symbol}({inner})"
        if symbol == '!':
            return f"!{inner}"
        return f"{symbol} {inner}"

    symbol = SYMBOL_OF[type(f)]
    level = BINARY_PRECEDENCE[symbol]
    right_assoc = symbol in RIGHT_ASSOCIATIVE

    left = render(f.left)
    left_level = _precedence(f.left)
    if left_level < level or (left_level == level and right_assoc):
        left = f"({left})"

    right = render(f.right)
    right_level = _precedence(f.right)
    if right_level < level or (right_level == level and not right_assoc):
        right = f"({right})"

    return f"{left} {symbol} {right}"


def map_children(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild a node with fn applied to each child"""
    if isinstance(f, Unary):
        return type(f)(fn(f.child))
    if isinstance(f, Binary):
        return type(f)(fn(f.left), fn(f.right))
    return f


def negate(f: Formula) -> Formula:
    """Syntactic negation"""
    return Not(f)


def to_core(f: Formula) -> Formula:
    """Rewrite into the core connectives true, atom, !, &, X, U"""
    if isinstance(f, (TrueConst, Atom)):
        return f
    if isinstance(f, FalseConst):
        return Not(TRUE)
    if isinstance(f, (Not, Next)):
        return type(f)(to_core(f.child))
    if isinstance(f, Eventually):
        return Until(TRUE, to_core(f.child))
    if isinstance(f, Globally):
        return Not(Until(TRUE, Not(to_core(f.child))))

    left, right = to_core(f.left), to_core(f.right)
    if isinstance(f, (And, Until)):
        return type(f)(left, right)
    if isinstance(f, Or):
        return Not(And(Not(left), Not(right)))
    if isinstance(f, Implies):
        return Not(And(left, Not(right)))
    if isinstance(f, Iff):
        return And(Not(And(left, Not(right))), Not(And(right, Not(left))))
    if isinstance(f, Release):
        return Not(Until(Not(left), Not(right)))
    raise TypeError(f"Unknown formula node {type(f).__name__}")


def to_nnf(f: Formula) -> Formula:
    """Negation normal form: Not only directly above atoms"""
    return _nnf(f, False)


def _nnf(f: Formula, negated: bool) -> Formula:
    if isinstance(f, TrueConst):
        return FALSE if negated else TRUE
    if isinstance(f, FalseConst):
        return TRUE if negated else FALSE
    if isinstance(f, Atom):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return _nnf(f.child, not negated)
    if isinstance(f, Next):
        return Next(_nnf(f.child, negated))
    if isinstance(f, Eventually):
        child = _nnf(f.child, negated)
        return Globally(child) if negated else Eventually(child)
    if isinstance(f, Globally):
        child = _nnf(f.child, negated)
        return Eventually(child) if negated else Globally(child)

    a, b = f.left, f.right
    if isinstance(f, And):
        left, right = _nnf(a, negated), _nnf(b, negated)
        return Or(left, right) if negated else And(left, right)
    if isinstance(f, Or):
        left, right = _nnf(a, negated), _nnf(b, negated)
        return And(left, right) if negated else Or(left, right)
    if isinstance(f, Implies):
        if negated:
            return And(_nnf(a, False), _nnf(b, True))
        return Or(_nnf(a, True), _nnf(b, False))
    if isinstance(f, Iff):
        if negated:
            return Or(And(_nnf(a, False), _nnf(b, True)),
                      And(_nnf(a, True), _nnf(b, False)))
        return Or(And(_nnf(a, False), _nnf(b, False)),
                  And(_nnf(a, True), _nnf(b, True)))
    if isinstance(f, Until):
        left, right = _nnf(a, negated), _nnf(b, negated)
        return Release(left, right) if negated else Until(left, right)
    if isinstance(f, Release):
        left, right = _nnf(a, negated), _nnf(b, negated)
        return Until(left, right) if negated else Release(left, right)
    raise TypeError(f"Unknown formula node {type(f).__name__}")


def subformulas(f: Formula) -> List[Formula]:
    """Distinct subformulas, children before parents"""
    seen: Dict[Formula, None] = {}

    def visit(node: Formula):
        if node in seen:
            return
        for child in node.children():
            visit(child)
        seen[node] = None

    visit(f)
    return list(seen)


def atomic_propositions(f: Formula) -> Tuple[str, ...]:
    """Atom names occurring in f, sorted"""
    return tuple(sorted({g.name for g in subformulas(f) if isinstance(g, Atom)}))


def rewrite_aps(f: Formula, substitution: Mapping[str, str]) -> Formula:
    """Rename atoms according to substitution"""
    if not substitution:
        return f
    if isinstance(f, Atom):
        return Atom(substitution.get(f.name, f.name))
    return map_children(f, lambda child: rewrite_aps(child, substitution))


def atom_renaming(original: Formula, candidate: Formula) -> Optional[Dict[str, str]]:
    """Rename map turning original into candidate, or None if candidate changes structure"""
    mapping: Dict[str, str] = {}
    stack = [(original, candidate)]
    while stack:
        left, right = stack.pop()
        if type(left) is not type(right):
            return None
        if isinstance(left, Atom):
            target = mapping.setdefault(left.name, right.name)
            if target != right.name:
                return None
            continue
        stack.extend(zip(left.children(), right.children()))
    return mapping


def formula_size(f: Formula) -> int:
    """Number of nodes in the tree"""
    return 1 + sum(formula_size(child) for child in f.children())


def temporal_depth(f: Formula) -> int:
    """Maximum nesting of temporal operators"""
    inner = max((temporal_depth(child) for child in f.children()), default=0)
    if isinstance(f, (Next, Eventually, Globally, Until, Release)):
        return inner + 1
    return inner
