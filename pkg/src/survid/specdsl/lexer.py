"""Tokenizer for ``.svs`` scenario specifications."""

from __future__ import annotations

import re
from dataclasses import dataclass

NUMBER_RE = re.compile(r"-?[0-9]+(\.[0-9]+)?([eE][+-]?[0-9]+)?")
WORD_EXTRA = set("_.#/+-@")
PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ":": "COLON",
    ";": "SEMI",
    ",": "COMMA",
}
ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


class LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(message)
        self.line = line
        self.column = column


def is_word_char(c: str) -> bool:
    return c.isalnum() or c in WORD_EXTRA


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, ending with an ``EOF`` token.

    ``#`` opens a comment only at the start of a token; inside a word it is an
    ordinary character, so ``JS#2`` is one word.
    """
    tokens: list[Token] = []
    i, n = 0, len(source)
    line, col = 1, 1

    def advance(k: int = 1) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n\ufeff":
            advance()
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                advance()
            continue
        start_line, start_col = line, col
        if c in PUNCT:
            tokens.append(Token(PUNCT[c], c, line, col))
            advance()
        elif c == "-" and source.startswith("->", i):
            tokens.append(Token("ARROW", "->", line, col))
            advance(2)
        elif c in "<>":
            if source.startswith("=", i + 1):
                tokens.append(Token("OP", c + "=", line, col))
                advance(2)
            else:
                tokens.append(Token("OP", c, line, col))
                advance()
        elif c in "≤≥":
            tokens.append(Token("OP", c, line, col))
            advance()
        elif c == "=":
            tokens.append(Token("EQ", "=", line, col))
            advance()
        elif c == '"':
            advance()
            chars: list[str] = []
            while True:
                if i >= n or source[i] == "\n":
                    raise LexError("unterminated string", start_line, start_col)
                ch = source[i]
                if ch == '"':
                    advance()
                    break
                if ch == "\\":
                    if i + 1 >= n or source[i + 1] not in ESCAPES:
                        raise LexError("invalid escape in string", line, col)
                    chars.append(ESCAPES[source[i + 1]])
                    advance(2)
                    continue
                chars.append(ch)
                advance()
            tokens.append(Token("STRING", "".join(chars), start_line, start_col))
        elif is_word_char(c):
            j = i
            while j < n and is_word_char(source[j]) and not source.startswith("->", j):
                j += 1
            text = source[i:j]
            kind = "NUMBER" if NUMBER_RE.fullmatch(text) else "WORD"
            tokens.append(Token(kind, text, line, col))
            advance(j - i)
        else:
            raise LexError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


def lexes_as(text: str, kinds: tuple[str, ...]) -> bool:
    """True if ``text`` reads back as one bare token of one of ``kinds``."""
    if not text or text[0] == "#":
        return False
    try:
        toks = tokenize(text)
    except LexError:
        return False
    return len(toks) == 2 and toks[0].kind in kinds and toks[0].text == text


def quote(text: str) -> str:
    out = text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'
