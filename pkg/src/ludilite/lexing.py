"""Tokenizer shared by the grammar recognizer and the game compiler.

Token classes: parentheses and braces, signed integers, double-quoted
strings (no escape sequences), and bare identifiers/keywords. Whitespace
separates tokens and is never part of a token.
"""

from __future__ import annotations

from dataclasses import dataclass

PUNCT_CHARS = "(){}"

PUNCT = "punct"
INT = "int"
STRING = "string"
IDENT = "ident"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


class LexError(Exception):
    """Raised when the input contains a malformed or unknown token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize_prefix(text: str) -> tuple[list[Token], LexError | None]:
    """Lex as much of ``text`` as possible.

    Returns the well-formed tokens found before the first lexing failure,
    plus the failure itself (or None when the whole input lexes cleanly).
    """
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in PUNCT_CHARS:
            tokens.append(Token(PUNCT, ch, i, i + 1))
            i += 1
            continue
        if ch == '"':
            start = i
            i += 1
            while i < n and text[i] != '"':
                i += 1
            if i >= n:
                return tokens, LexError("unterminated quoted string", start)
            i += 1
            tokens.append(Token(STRING, text[start:i], start, i))
            continue
        if ch == "-" or ch.isdigit():
            start = i
            if ch == "-":
                i += 1
                if i >= n or not text[i].isdigit():
                    return tokens, LexError("expected digit after '-'", start)
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(Token(INT, text[start:i], start, i))
            continue
        if _is_ident_start(ch):
            start = i
            while i < n and _is_ident_char(text[i]):
                i += 1
            tokens.append(Token(IDENT, text[start:i], start, i))
            continue
        return tokens, LexError(f"unexpected character {ch!r}", i)
    return tokens, None


def tokenize(text: str) -> list[Token]:
    """Lex the whole input, raising :class:`LexError` on the first failure."""
    tokens, err = tokenize_prefix(text)
    if err is not None:
        raise err
    return tokens


def string_value(token: Token) -> str:
    """Contents of a string token without the surrounding quotes."""
    return token.text[1:-1]
