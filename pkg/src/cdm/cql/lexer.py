"""Hand-written scanner for the CDM query language."""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import CDMError

KEYWORDS = frozenset(
    "THING ASSOC DROP OWNERS MEMBERS OF REACH UP DOWN ANY PATHS TO TRACE "
    "ASOF VALIDATE STATS EXPORT DOT SQL".split()
)

KEYWORD = "keyword"
STRING = "string"
INTEGER = "integer"
ARROW = "arrow"
SEMICOLON = "semicolon"
IDENTIFIER = "identifier"
LBRACE = "lbrace"
RBRACE = "rbrace"
EOF = "eof"

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str  # raw source slice
    position: tuple[int, int]  # (line, column), 1-based
    value: object = None  # keyword in upper case, unescaped string, or int


class LexError(CDMError):
    def __init__(self, message: str, position: tuple[int, int]):
        super().__init__(f"{position[0]}:{position[1]}: {message}")
        self.position = position


class UnterminatedString(LexError):
    pass


class IllegalCharacter(LexError):
    pass


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens; whitespace and ``--`` comments are dropped.

    The returned list does not include an end-of-input token.
    """
    tokens: list[Token] = []
    i = 0
    line, col = 1, 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in source[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = source[i]
        start = (line, col)
        if ch in " \t\r\n":
            advance(1)
        elif source.startswith("--", i):
            end = source.find("\n", i)
            advance((n if end == -1 else end) - i)
        elif source.startswith("->", i):
            tokens.append(Token(ARROW, "->", start))
            advance(2)
        elif ch == ";":
            tokens.append(Token(SEMICOLON, ch, start))
            advance(1)
        elif ch == "{":
            tokens.append(Token(LBRACE, ch, start))
            advance(1)
        elif ch == "}":
            tokens.append(Token(RBRACE, ch, start))
            advance(1)
        elif ch == '"':
            j = i + 1
            chars = []
            while True:
                if j >= n:
                    raise UnterminatedString("unterminated string literal", start)
                c = source[j]
                if c == '"':
                    break
                if c == "\\":
                    if j + 1 >= n:
                        raise UnterminatedString("unterminated string literal", start)
                    esc = source[j + 1]
                    if esc not in _ESCAPES:
                        raise IllegalCharacter(f"invalid escape \\{esc}", _position_at(source, j))
                    chars.append(_ESCAPES[esc])
                    j += 2
                else:
                    chars.append(c)
                    j += 1
            text = source[i:j + 1]
            tokens.append(Token(STRING, text, start, "".join(chars)))
            advance(len(text))
        elif ch.isascii() and ch.isdigit():
            j = i
            while j < n and source[j].isascii() and source[j].isdigit():
                j += 1
            text = source[i:j]
            tokens.append(Token(INTEGER, text, start, int(text)))
            advance(len(text))
        elif ch.isascii() and (ch.isalpha() or ch == "_"):
            j = i
            while j < n and source[j].isascii() and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            upper = text.upper()
            if upper in KEYWORDS:
                tokens.append(Token(KEYWORD, text, start, upper))
            else:
                tokens.append(Token(IDENTIFIER, text, start, text))
            advance(len(text))
        else:
            raise IllegalCharacter(f"illegal character {ch!r}", start)
    return tokens


def _position_at(source: str, offset: int) -> tuple[int, int]:
    return source.count("\n", 0, offset) + 1, offset - source.rfind("\n", 0, offset)


def end_position(source: str) -> tuple[int, int]:
    """Position just past the last character of ``source``."""
    return _position_at(source, len(source))
