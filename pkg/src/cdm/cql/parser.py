"""Recursive-descent parser for the CDM query language.

Grammar::

    script     := statement* ;
    statement  := create | assoc | drop | query | export
                | "VALIDATE" ";" | "STATS" ";" ;
    create     := "THING" STRING ";" ;
    assoc      := "ASSOC" STRING "->" STRING ";" ;
    drop       := "DROP" ("THING" STRING | "ASSOC" STRING "->" STRING) ";" ;
    query      := ("OWNERS" "OF" STRING | "MEMBERS" "OF" STRING
                 | "REACH" STRING ("UP" | "DOWN" | "ANY")
                 | "PATHS" STRING "TO" STRING | "TRACE" STRING) ";"
                 | "ASOF" INTEGER "{" query "}" ;
    export     := "EXPORT" ("DOT" | "SQL") STRING ";" ;

``ASOF`` nests exactly one level: its body is a plain query.
"""
from __future__ import annotations

from ..errors import CDMError
from . import ast
from .lexer import (
    ARROW, EOF, INTEGER, KEYWORD, LBRACE, RBRACE, SEMICOLON, STRING, Token,
    end_position, tokenize,
)

_QUERY_KEYWORDS = ("OWNERS", "MEMBERS", "REACH", "PATHS", "TRACE")
_STATEMENT_KEYWORDS = ("THING", "ASSOC", "DROP") + _QUERY_KEYWORDS + (
    "ASOF", "EXPORT", "VALIDATE", "STATS",
)
_MUTATION_KEYWORDS = ("THING", "ASSOC", "DROP")


class ParseError(CDMError):
    def __init__(self, position: tuple[int, int], expected: str, found: str, message: str | None = None):
        self.position = position
        self.expected = expected
        self.found = found
        text = message or f"expected {expected}, found {found}"
        super().__init__(f"{position[0]}:{position[1]}: {text}")


def _describe(token: Token) -> str:
    return "end of input" if token.kind == EOF else repr(token.text)


class _Parser:
    def __init__(self, tokens: list[Token], eof_position: tuple[int, int]):
        self.tokens = tokens
        self.eof = Token(EOF, "", eof_position)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else self.eof

    def fail(self, expected: str, message: str | None = None):
        token = self.peek()
        raise ParseError(token.position, expected, _describe(token), message)

    def expect(self, kind: str, keyword: str | None = None, expected: str | None = None) -> Token:
        token = self.peek()
        if token.kind != kind or (keyword is not None and token.value != keyword):
            self.fail(expected or keyword or kind)
        self.pos += 1
        return token

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == KEYWORD and token.value in words

    def keyword(self, *words: str) -> str:
        if not self.at_keyword(*words):
            self.fail(" or ".join(words))
        token = self.peek()
        self.pos += 1
        return token.value

    def string(self) -> str:
        return self.expect(STRING, expected="string literal").value

    def script(self) -> list:
        statements = []
        while self.peek().kind != EOF:
            statements.append(self.statement())
        return statements

    def statement(self):
        start = self.peek().position
        if not self.at_keyword(*_STATEMENT_KEYWORDS):
            self.fail("statement keyword")
        word = self.peek().value
        if word in _QUERY_KEYWORDS or word == "ASOF":
            return self.query(start, allow_asof=True)
        self.pos += 1
        if word == "THING":
            stmt = ast.CreateThing(self.string(), position=start)
        elif word == "ASSOC":
            member = self.string()
            self.expect(ARROW, expected="'->'")
            stmt = ast.Assoc(member, self.string(), position=start)
        elif word == "DROP":
            if self.keyword("THING", "ASSOC") == "THING":
                stmt = ast.DropThing(self.string(), position=start)
            else:
                member = self.string()
                self.expect(ARROW, expected="'->'")
                stmt = ast.DropAssoc(member, self.string(), position=start)
        elif word == "EXPORT":
            kind = self.keyword("DOT", "SQL")
            path = self.string()
            stmt = (ast.ExportDot if kind == "DOT" else ast.ExportSql)(path, position=start)
        elif word == "VALIDATE":
            stmt = ast.Validate(position=start)
        else:
            stmt = ast.Stats(position=start)
        self.expect(SEMICOLON, expected="';'")
        return stmt

    def query(self, start, *, allow_asof: bool):
        if self.at_keyword("ASOF"):
            if not allow_asof:
                self.fail("query", "ASOF cannot be nested inside ASOF")
            self.pos += 1
            tick = self.expect(INTEGER, expected="tick").value
            self.expect(LBRACE, expected="'{'")
            if self.at_keyword(*_MUTATION_KEYWORDS):
                self.fail("query", "mutation not allowed inside ASOF")
            inner = self.query(self.peek().position, allow_asof=False)
            self.expect(RBRACE, expected="'}'")
            return ast.AsOf(tick, inner, position=start)

        word = self.keyword(*_QUERY_KEYWORDS)
        if word == "OWNERS":
            self.keyword("OF")
            stmt = ast.Owners(self.string(), position=start)
        elif word == "MEMBERS":
            self.keyword("OF")
            stmt = ast.Members(self.string(), position=start)
        elif word == "REACH":
            label = self.string()
            stmt = ast.Reach(label, self.keyword("UP", "DOWN", "ANY"), position=start)
        elif word == "PATHS":
            source = self.string()
            self.keyword("TO")
            stmt = ast.Paths(source, self.string(), position=start)
        else:
            stmt = ast.Trace(self.string(), position=start)
        self.expect(SEMICOLON, expected="';'")
        return stmt


def parse(tokens: list[Token], *, eof_position: tuple[int, int] | None = None) -> list:
    """Statements in source order; raises :class:`ParseError` on bad input."""
    if eof_position is None:
        if tokens:
            last = tokens[-1]
            eof_position = (last.position[0], last.position[1] + len(last.text))
        else:
            eof_position = (1, 1)
    return _Parser(tokens, eof_position).script()


def parse_source(source: str) -> list:
    return parse(tokenize(source), eof_position=end_position(source))
