"""``cdm`` command-line tool.

Exit codes: 0 success, 1 domain error (unknown label, rule violation, bad or
missing log), 2 usage or query-language syntax error. Results go to stdout,
diagnostics to stderr.

Every mutation is appended to the log file and flushed to disk before its
acknowledgement is printed, one record per write, so the file always holds a
whole number of records.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from . import cql, query, relational, storage
from .cql.lexer import LexError
from .cql.parser import ParseError
from .errors import CDMError
from .model import CreateRecord

try:
    import fcntl
except ImportError:  # pragma: no cover - non-POSIX
    fcntl = None

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


@dataclass
class CliConfig:
    log_path: str
    strict_tree: bool = False
    path_limit: int = query.DEFAULT_PATH_LIMIT
    output: str = "text"

    def __post_init__(self):
        if self.path_limit < 1:
            raise ValueError("path_limit must be >= 1")


class UsageError(Exception):
    pass


class LogLocked(CDMError):
    pass


class Session:
    """A model loaded from a log file that this process holds exclusively."""

    def __init__(self, config: CliConfig):
        self.config = config
        path = Path(config.log_path)
        if not path.exists():
            raise CDMError(f"log file not found: {path} (create it with 'cdm init')")
        self._fh = open(path, "ab")
        if fcntl is not None:
            try:
                fcntl.flock(self._fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
            except OSError:
                self._fh.close()
                raise LogLocked(f"log file is in use by another process: {path}") from None
        try:
            self.model = storage.load(path, strict_tree=config.strict_tree)
        except Exception:
            self.close()
            raise

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def run(self, stmt):
        before = len(self.model.records)
        result = cql.evaluate(self.model, stmt, path_limit=self.config.path_limit)
        for record in self.model.records[before:]:
            self._fh.write((storage.encode_record(record) + "\n").encode("utf-8"))
            self._fh.flush()
            os.fsync(self._fh.fileno())
        return result


def render(result, output: str, out: TextIO) -> None:
    if output == "json":
        out.write(json.dumps(result.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
    else:
        for line in result.lines():
            out.write(line + "\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log", help="log file (default: $CDM_LOG)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--strict-tree", action="store_true",
                        help="reject associations that close an undirected cycle")
    common.add_argument("--path-limit", type=_positive_int, default=query.DEFAULT_PATH_LIMIT)

    parser = argparse.ArgumentParser(prog="cdm", description="Cognitive Data Model engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", parents=[common], help="create an empty log file")
    p.add_argument("path", nargs="?")

    p = sub.add_parser("exec", parents=[common], help="run a CQL script")
    p.add_argument("script", nargs="?", help="script file ('-' for stdin)")
    p.add_argument("--query", help="CQL source given inline")

    sub.add_parser("repl", parents=[common], help="interactive CQL session")
    sub.add_parser("validate", parents=[common], help="check the log and report warnings")
    sub.add_parser("stats", parents=[common], help="print model statistics")

    p = sub.add_parser("export", parents=[common], help="export as DOT or SQL")
    p.add_argument("kind", choices=("dot", "sql"))
    p.add_argument("--out", help="output file (default: stdout)")

    p = sub.add_parser("trace", parents=[common], help="history of one thing")
    p.add_argument("label")
    return parser


def _config(args) -> CliConfig:
    log = args.log or os.environ.get("CDM_LOG")
    if not log:
        raise UsageError("--log is required (or set CDM_LOG)")
    return CliConfig(log, args.strict_tree, args.path_limit, args.format)


def _exec_source(session: Session, source: str, out: TextIO) -> None:
    for stmt in cql.parse_source(source):
        render(session.run(stmt), session.config.output, out)


def repl(config: CliConfig, stdin: TextIO, stdout: TextIO, stderr: TextIO) -> int:
    """Read statements line by line until ``\\q`` or end of input.

    A statement may span lines; input is buffered until it parses or fails
    somewhere other than at its end. Errors are reported and the session
    goes on.
    """
    with Session(config) as session:
        buffer = ""
        while True:
            stderr.write("...> " if buffer else "cdm> ")
            stderr.flush()
            line = stdin.readline()
            if not line:
                break
            if not buffer and line.strip() == "\\q":
                break
            if not buffer and not line.strip():
                continue
            buffer += line
            try:
                statements = cql.parse_source(buffer)
            except ParseError as exc:
                if exc.found == "end of input":
                    continue
                stderr.write(f"syntax error: {exc}\n")
                buffer = ""
                continue
            except LexError as exc:
                stderr.write(f"syntax error: {exc}\n")
                buffer = ""
                continue
            buffer = ""
            for stmt in statements:
                try:
                    render(session.run(stmt), config.output, stdout)
                except CDMError as exc:
                    stderr.write(f"error: {exc}\n")
        if buffer.strip():
            stderr.write("error: incomplete statement at end of input\n")
    return EXIT_OK


def _validate(config: CliConfig, out: TextIO, err: TextIO) -> int:
    records = storage.read_records(Path(config.log_path).read_bytes())
    report = query.validate(records)
    labels = {r.id: r.label for r in records if isinstance(r, CreateRecord)}
    render(cql.Report(report, labels), config.output, out)
    if report.errors:
        err.write(f"error: log breaks {len(report.errors)} hard invariant(s)\n")
        return EXIT_DOMAIN
    return EXIT_OK


def run(argv=None, *, stdin: TextIO | None = None, stdout: TextIO | None = None,
        stderr: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    try:
        if args.command == "init":
            target = args.path or args.log or os.environ.get("CDM_LOG")
            if not target:
                raise UsageError("init needs a path")
            path = Path(target)
            if path.exists():
                raise CDMError(f"refusing to overwrite existing file: {path}")
            path.write_bytes(b"")
            stderr.write(f"initialised {path}\n")
            return EXIT_OK

        config = _config(args)
        if args.command == "exec":
            if args.script is None and args.query is None:
                raise UsageError("exec needs a script file or --query")
            sources = []
            if args.script == "-":
                sources.append(stdin.read())
            elif args.script is not None:
                sources.append(Path(args.script).read_text(encoding="utf-8"))
            if args.query is not None:
                sources.append(args.query)
            # parse everything up front so a syntax error runs nothing
            for source in sources:
                cql.parse_source(source)
            with Session(config) as session:
                for source in sources:
                    _exec_source(session, source, stdout)
            return EXIT_OK
        if args.command == "repl":
            return repl(config, stdin, stdout, stderr)
        if args.command == "validate":
            return _validate(config, stdout, stderr)
        if args.command == "stats":
            with Session(config) as session:
                render(session.run(cql.Stats()), config.output, stdout)
            return EXIT_OK
        if args.command == "trace":
            with Session(config) as session:
                render(session.run(cql.Trace(args.label)), config.output, stdout)
            return EXIT_OK
        if args.command == "export":
            with Session(config) as session:
                if args.kind == "dot":
                    text = storage.render_dot(session.model)
                else:
                    text = relational.emit_sql(relational.to_relational(session.model))
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8", newline="\n")
            else:
                stdout.write(text)
            return EXIT_OK
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ParseError, LexError) as exc:
        stderr.write(f"syntax error: {exc}\n")
        return EXIT_USAGE
    except (CDMError, OSError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    return EXIT_USAGE  # pragma: no cover - argparse enforces a command


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
