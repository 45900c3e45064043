"""
Linear temporal logic: syntax tree, parser and lasso-word semantics
"""

from ltl.formula import (
    And, Atom, Eventually, FalseConst, Formula, Globally, Iff, Implies, Next, Not, Or,
    Release, TrueConst, Until, atomic_propositions, negate, render, rewrite_aps, to_core,
    to_nnf,
)
from ltl.lexer import DiagnosticKind, SyntaxDiagnostic, Token, TokenKind, tokenize
from ltl.parser import check_operators, check_syntax, parse
from ltl.semantics import LassoWord, Symbol, eval_lasso

__all__ = [
    "And", "Atom", "Eventually", "FalseConst", "Formula", "Globally", "Iff", "Implies",
    "Next", "Not", "Or", "Release", "TrueConst", "Until", "atomic_propositions", "negate",
    "render", "rewrite_aps", "to_core", "to_nnf", "DiagnosticKind", "SyntaxDiagnostic",
    "Token", "TokenKind", "tokenize", "check_operators", "check_syntax", "parse",
    "LassoWord", "Symbol", "eval_lasso",
]
