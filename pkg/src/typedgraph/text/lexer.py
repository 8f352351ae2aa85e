"""Tokenizer shared by the schema, instance and manifest readers."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Any

from ..errors import ParseError

IDENT = "ident"
INT = "int"
DECIMAL = "decimal"
STRING = "string"
OP = "op"
EOF = "eof"

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<decimal>-?\d+\.\d+)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|\.\.|<=|>=|!=|[{}()\[\]<>,:;=|*.])
    """,
    re.VERBOSE,
)

SYMID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

CMP_OPS = ("<", "<=", "=", "!=", ">=", ">")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    column: int
    message: str
    expected: str | None = None

    def __str__(self) -> str:
        hint = f" (expected {self.expected})" if self.expected else ""
        return f"{self.line}:{self.column}: {self.severity}: {self.message}{hint}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int

    def describe(self) -> str:
        return "end of input" if self.kind == EOF else repr(self.text)


class SyntaxProblem(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            if ch == '"':
                msg = "unterminated string literal"
            else:
                msg = f"unexpected character {ch!r}"
            raise ParseError([Diagnostic("error", line, col, msg)])
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token(EOF, "", line, pos - line_start + 1))
    return tokens


def decode_string(tok: Token) -> str:
    try:
        return json.loads(tok.text)
    except ValueError:
        raise SyntaxProblem(Diagnostic("error", tok.line, tok.column, "invalid escape in string literal")) from None


def encode_string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def format_decimal(d: Decimal) -> str:
    text = format(d, "f")
    return text if "." in text else text + ".0"


def format_literal(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Decimal):
        return format_decimal(v)
    if isinstance(v, str):
        return encode_string(v)
    return str(v)


def format_label(label: str) -> str:
    """Bare identifier when possible, quoted string otherwise."""
    return label if SYMID_RE.match(label) else encode_string(label)


class TokenStream:
    """Cursor over a token list with expectation helpers for the parsers."""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, text: str, kind: str | None = None) -> bool:
        tok = self.current
        if kind is not None and tok.kind != kind:
            return False
        return tok.text == text and tok.kind in (OP, IDENT)

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def fail(self, message: str, expected: str | None = None, tok: Token | None = None):
        tok = tok or self.current
        raise SyntaxProblem(Diagnostic("error", tok.line, tok.column, message, expected))

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.advance()
        self.fail(f"unexpected {self.current.describe()}", repr(text))

    def expect_kind(self, kind: str, what: str | None = None) -> Token:
        if self.current.kind == kind:
            return self.advance()
        self.fail(f"unexpected {self.current.describe()}", what or kind)

    def ident(self, what: str = "identifier") -> str:
        return self.expect_kind(IDENT, what).text

    def label(self, what: str = "label") -> str:
        """An identifier or a quoted string (for labels such as ``"orders/from"``)."""
        tok = self.current
        if tok.kind == IDENT:
            return self.advance().text
        if tok.kind == STRING:
            self.advance()
            return decode_string(tok)
        self.fail(f"unexpected {tok.describe()}", what)

    def integer(self) -> int:
        return int(self.expect_kind(INT, "integer").text)

    def literal(self) -> Any:
        """A scalar literal: int, decimal, string or boolean."""
        tok = self.current
        if tok.kind == INT:
            self.advance()
            return int(tok.text)
        if tok.kind == DECIMAL:
            self.advance()
            return Decimal(tok.text)
        if tok.kind == STRING:
            self.advance()
            return decode_string(tok)
        if tok.kind == IDENT and tok.text in ("true", "false"):
            self.advance()
            return tok.text == "true"
        self.fail(f"unexpected {tok.describe()}", "literal")
