"""The CDM query language: tokenize, parse, format and evaluate."""
from .ast import (
    AsOf, Assoc, CreateThing, DropAssoc, DropThing, ExportDot, ExportSql,
    Members, Owners, Paths, Reach, Stats, Trace, Validate,
)
from .evaluator import (
    Ack, Names, PathsResult, Report, Table, TraceResult, evaluate, execute,
    is_mutation,
)
from .formatter import format, format_statement
from .lexer import IllegalCharacter, LexError, Token, UnterminatedString, tokenize
from .parser import ParseError, parse, parse_source

__all__ = [
    "AsOf", "Assoc", "CreateThing", "DropAssoc", "DropThing", "ExportDot",
    "ExportSql", "Members", "Owners", "Paths", "Reach", "Stats", "Trace",
    "Validate", "Ack", "Names", "PathsResult", "Report", "Table",
    "TraceResult", "evaluate", "execute", "is_mutation", "format",
    "format_statement", "IllegalCharacter", "LexError", "Token",
    "UnterminatedString", "tokenize", "ParseError", "parse", "parse_source",
]
