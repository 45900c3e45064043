"""
LTL grammar, tokenizer and syntax diagnostics
"""

import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from lark import Lark
from lark.exceptions import UnexpectedCharacters

# Loosest level first; & binds tighter than U, unary operators tightest.
# A run of temporal letters such as GF lexes as one TEMPORAL token.
LTL_GRAMMAR = r'''
TEMPORAL.3: /[FGX]+(?![A-Za-z0-9_])/
_UNTIL.3: /U(?![A-Za-z0-9_])/
CONSTANT.2: /(true|false|0|1)(?![A-Za-z0-9_])/
ATOM: /[A-Za-z_][A-Za-z0-9_]*/
_IFF: "<->"
_IMPLIES: "->"
_AND: "&"
_OR: "|"
_NOT: "!"
_LPAR: "("
_RPAR: ")"

?start: iff_level

?iff_level: implies_level
    | iff_level _IFF implies_level -> iff

?implies_level: or_level
    | or_level _IMPLIES implies_level -> implies

?or_level: until_level
    | or_level _OR until_level -> disjunction

?until_level: and_level
    | and_level _UNTIL until_level -> until

?and_level: unary_level
    | and_level _AND unary_level -> conjunction

?unary_level: primary
    | _NOT unary_level -> negation
    | TEMPORAL unary_level -> temporal

?primary: ATOM -> atom
    | CONSTANT -> constant
    | _LPAR iff_level _RPAR

%import common.WS
%ignore WS
'''

LTL_LARK = Lark(LTL_GRAMMAR, parser='lalr', lexer='basic')

_IDENTIFIER_RUN = re.compile(r'[A-Za-z0-9_]+')


class TokenKind(Enum):
    """Lexical categories"""
    ATOM = "atom"
    OPERATOR = "operator"
    LEFT_PAREN = "left-paren"
    RIGHT_PAREN = "right-paren"
    CONSTANT = "constant"


class DiagnosticKind(Enum):
    """Syntax problem categories"""
    UNBALANCED_PAREN = "unbalanced-paren"
    MISSING_OPERAND = "missing-operand"
    MISSING_OPERATOR = "missing-operator"
    DANGLING_OPERATOR = "dangling-operator"
    UNKNOWN_TOKEN = "unknown-token"
    EMPTY_FORMULA = "empty-formula"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    position: int

    @property
    def is_unary_operator(self) -> bool:
        return self.kind == TokenKind.OPERATOR and self.lexeme in UNARY_OPERATORS

    @property
    def is_binary_operator(self) -> bool:
        return self.kind == TokenKind.OPERATOR and self.lexeme in BINARY_OPERATORS

    @property
    def is_operand(self) -> bool:
        return self.kind in (TokenKind.ATOM, TokenKind.CONSTANT)


@dataclass(frozen=True)
class SyntaxDiagnostic:
    kind: DiagnosticKind
    position: int
    message: str

    def __str__(self) -> str:
        return f"{self.kind.value} at {self.position}: {self.message}"


UNARY_OPERATORS = {'!', 'X', 'F', 'G'}
BINARY_OPERATORS = {'&', '|', '->', '<->', 'U'}

_KIND_OF_TERMINAL = {
    'ATOM': TokenKind.ATOM,
    'CONSTANT': TokenKind.CONSTANT,
    '_LPAR': TokenKind.LEFT_PAREN,
    '_RPAR': TokenKind.RIGHT_PAREN,
}


def _convert(lark_token, offset: int) -> List[Token]:
    position = offset + lark_token.start_pos
    if lark_token.type == 'TEMPORAL':
        # GF a is G F a
        return [Token(TokenKind.OPERATOR, letter, position + i)
                for i, letter in enumerate(lark_token.value)]
    kind = _KIND_OF_TERMINAL.get(lark_token.type, TokenKind.OPERATOR)
    return [Token(kind, lark_token.value, position)]


def _unknown(text: str, position: int) -> Tuple[SyntaxDiagnostic, int]:
    """Diagnostic for the unlexable text at position, and where lexing resumes"""
    run = _IDENTIFIER_RUN.match(text, position)
    if run:
        # Only a digit can start a run the grammar rejects
        return SyntaxDiagnostic(
            DiagnosticKind.UNKNOWN_TOKEN, position,
            f"'{run.group()}' is not an identifier (identifiers cannot start with a digit)"), run.end()
    return SyntaxDiagnostic(
        DiagnosticKind.UNKNOWN_TOKEN, position, f"unexpected character '{text[position]}'"), position + 1


def tokenize(text: str) -> Tuple[List[Token], List[SyntaxDiagnostic]]:
    """Split LTL text into tokens; returns (tokens, diagnostics)"""
    if not text or not text.strip():
        return [], [SyntaxDiagnostic(DiagnosticKind.EMPTY_FORMULA, 0, "formula is empty")]

    tokens: List[Token] = []
    diagnostics: List[SyntaxDiagnostic] = []
    offset = 0

    # The lark lexer stops at the first bad character; resume after it to report them all
    while offset < len(text):
        try:
            for lark_token in LTL_LARK.lex(text[offset:]):
                tokens.extend(_convert(lark_token, offset))
            break
        except UnexpectedCharacters as err:
            diagnostic, offset = _unknown(text, offset + err.pos_in_stream)
            diagnostics.append(diagnostic)

    if diagnostics:
        return [], diagnostics
    return tokens, []
