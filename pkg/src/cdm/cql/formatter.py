"""Canonical pretty-printer; ``parse_source(format(s)) == s``."""
from __future__ import annotations

from . import ast


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def format_statement(stmt) -> str:
    if isinstance(stmt, ast.CreateThing):
        return f"THING {quote(stmt.label)};"
    if isinstance(stmt, ast.Assoc):
        return f"ASSOC {quote(stmt.member)} -> {quote(stmt.owner)};"
    if isinstance(stmt, ast.DropThing):
        return f"DROP THING {quote(stmt.label)};"
    if isinstance(stmt, ast.DropAssoc):
        return f"DROP ASSOC {quote(stmt.member)} -> {quote(stmt.owner)};"
    if isinstance(stmt, ast.Owners):
        return f"OWNERS OF {quote(stmt.label)};"
    if isinstance(stmt, ast.Members):
        return f"MEMBERS OF {quote(stmt.label)};"
    if isinstance(stmt, ast.Reach):
        return f"REACH {quote(stmt.label)} {stmt.direction.upper()};"
    if isinstance(stmt, ast.Paths):
        return f"PATHS {quote(stmt.source)} TO {quote(stmt.target)};"
    if isinstance(stmt, ast.Trace):
        return f"TRACE {quote(stmt.label)};"
    if isinstance(stmt, ast.AsOf):
        return f"ASOF {stmt.tick} {{ {format_statement(stmt.inner)} }}"
    if isinstance(stmt, ast.Validate):
        return "VALIDATE;"
    if isinstance(stmt, ast.Stats):
        return "STATS;"
    if isinstance(stmt, ast.ExportDot):
        return f"EXPORT DOT {quote(stmt.path)};"
    if isinstance(stmt, ast.ExportSql):
        return f"EXPORT SQL {quote(stmt.path)};"
    raise TypeError(f"not a statement: {stmt!r}")


def format(statements) -> str:  # noqa: A001 - mirrors the language's own name
    return "".join(format_statement(s) + "\n" for s in statements)
