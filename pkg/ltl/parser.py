"""
Operator matching diagnostics and the lark-based LTL parser
"""

import logging
from typing import List, Sequence

from lark import Transformer, v_args
from lark.exceptions import LarkError

from ltl.formula import (
    FALSE, TRUE, And, Atom, Formula, Iff, Implies, Not, Or, UNARY_SYMBOLS, Until,
)
from ltl.lexer import LTL_LARK, DiagnosticKind, SyntaxDiagnostic, Token, TokenKind, tokenize
from utils.validators import LTLSyntaxError

logger = logging.getLogger(__name__)


def check_operators(tokens: Sequence[Token]) -> List[SyntaxDiagnostic]:
    """Report every operator and parenthesis problem in one left-to-right pass"""
    if not tokens:
        return [SyntaxDiagnostic(DiagnosticKind.EMPTY_FORMULA, 0, "formula is empty")]

    diagnostics: List[SyntaxDiagnostic] = []
    open_parens: List[int] = []
    expect_operand = True
    previous = None

    def report(kind: DiagnosticKind, position: int, message: str):
        diagnostics.append(SyntaxDiagnostic(kind, position, message))

    def close_paren(tok: Token):
        if open_parens:
            open_parens.pop()
        else:
            report(DiagnosticKind.UNBALANCED_PAREN, tok.position, "')' has no matching '('")

    for tok in tokens:
        if expect_operand:
            if tok.is_operand:
                expect_operand = False
            elif tok.is_unary_operator:
                pass
            elif tok.kind == TokenKind.LEFT_PAREN:
                open_parens.append(tok.position)
            elif tok.is_binary_operator:
                report(DiagnosticKind.MISSING_OPERAND, tok.position,
                       f"'{tok.lexeme}' has no left operand")
            elif tok.kind == TokenKind.RIGHT_PAREN:
                if previous is None or previous.kind == TokenKind.LEFT_PAREN:
                    report(DiagnosticKind.MISSING_OPERAND, tok.position,
                           "parentheses enclose nothing")
                else:
                    report(DiagnosticKind.DANGLING_OPERATOR, previous.position,
                           f"'{previous.lexeme}' has no right operand")
                close_paren(tok)
                expect_operand = False
        else:
            if tok.is_binary_operator:
                expect_operand = True
            elif tok.kind == TokenKind.RIGHT_PAREN:
                close_paren(tok)
            else:
                report(DiagnosticKind.MISSING_OPERATOR, tok.position,
                       f"'{tok.lexeme}' follows an operand without a binary operator")
                if tok.kind == TokenKind.LEFT_PAREN:
                    open_parens.append(tok.position)
                    expect_operand = True
                elif tok.is_unary_operator:
                    expect_operand = True
        previous = tok

    if expect_operand:
        if previous.kind == TokenKind.OPERATOR:
            report(DiagnosticKind.DANGLING_OPERATOR, previous.position,
                   f"'{previous.lexeme}' has no right operand")
        elif previous.kind == TokenKind.LEFT_PAREN:
            report(DiagnosticKind.MISSING_OPERAND, previous.position,
                   "'(' is not followed by a formula")

    for position in open_parens:
        report(DiagnosticKind.UNBALANCED_PAREN, position, "'(' is never closed")

    diagnostics.sort(key=lambda d: d.position)
    return diagnostics


def check_syntax(text: str) -> List[SyntaxDiagnostic]:
    """Tokenize and check text; empty list when well-formed"""
    tokens, diagnostics = tokenize(text)
    if diagnostics:
        return diagnostics
    return check_operators(tokens)


@v_args(inline=True)
class FormulaBuilder(Transformer):
    """Turns an LTL_LARK parse tree into a Formula"""

    def atom(self, token) -> Formula:
        return Atom(str(token))

    def constant(self, token) -> Formula:
        return TRUE if token in ('true', '1') else FALSE

    def negation(self, child: Formula) -> Formula:
        return Not(child)

    def temporal(self, letters, child: Formula) -> Formula:
        for letter in reversed(str(letters)):
            child = UNARY_SYMBOLS[letter](child)
        return child

    def conjunction(self, left: Formula, right: Formula) -> Formula:
        return And(left, right)

    def until(self, left: Formula, right: Formula) -> Formula:
        return Until(left, right)

    def disjunction(self, left: Formula, right: Formula) -> Formula:
        return Or(left, right)

    def implies(self, left: Formula, right: Formula) -> Formula:
        return Implies(left, right)

    def iff(self, left: Formula, right: Formula) -> Formula:
        return Iff(left, right)


_BUILDER = FormulaBuilder()


def parse(text: str) -> Formula:
    """Parse LTL text into a Formula"""
    tokens, diagnostics = tokenize(text)
    if not diagnostics:
        diagnostics = check_operators(tokens)
    if diagnostics:
        logger.debug("Rejected formula %r: %s", text, diagnostics)
        raise LTLSyntaxError(diagnostics, text)
    try:
        return _BUILDER.transform(LTL_LARK.parse(text))
    except LarkError as err:
        logger.warning("Parser rejected checked formula %r: %s", text, err)
        position = getattr(err, 'pos_in_stream', None) or 0
        raise LTLSyntaxError([SyntaxDiagnostic(
            DiagnosticKind.MISSING_OPERATOR, position, "formula does not match the LTL grammar")], text) from err
