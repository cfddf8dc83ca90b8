"""Text log format, deterministic replay and Graphviz DOT export.

One record per line, LF-terminated, UTF-8::

    T <tick> <id> "<label>"
    A <tick> <member> <owner>
    RT <tick> <id>
    RA <tick> <member> <owner>

Labels are double-quoted; ``"``, ``\\`` and newline are escaped as ``\\"``,
``\\\\`` and ``\\n``.
"""
from __future__ import annotations

import hashlib
import io
import re
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from .errors import InvariantViolation, MalformedRecord
from .model import (
    AssociateRecord,
    CreateRecord,
    LogRecord,
    Model,
    RemoveAssociationRecord,
    RemoveThingRecord,
)

_INT = r"(0|[1-9][0-9]*)"
_LABEL = r'"((?:[^"\\\n]|\\["\\n])*)"'
_PATTERNS = {
    "T": re.compile(rf"T {_INT} {_INT} {_LABEL}"),
    "A": re.compile(rf"A {_INT} {_INT} {_INT}"),
    "RT": re.compile(rf"RT {_INT} {_INT}"),
    "RA": re.compile(rf"RA {_INT} {_INT} {_INT}"),
}
_UNESCAPE = re.compile(r"\\(.)")


def quote_label(label: str) -> str:
    escaped = label.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{escaped}"'


def unquote_label(body: str) -> str:
    return _UNESCAPE.sub(lambda m: "\n" if m.group(1) == "n" else m.group(1), body)


def encode_record(record: LogRecord) -> str:
    """Canonical single-line form of ``record`` (no trailing newline)."""
    if isinstance(record, CreateRecord):
        return f"T {record.tick} {record.id} {quote_label(record.label)}"
    if isinstance(record, AssociateRecord):
        return f"A {record.tick} {record.member} {record.owner}"
    if isinstance(record, RemoveThingRecord):
        return f"RT {record.tick} {record.id}"
    if isinstance(record, RemoveAssociationRecord):
        return f"RA {record.tick} {record.member} {record.owner}"
    raise TypeError(f"not a log record: {record!r}")


def encode_log(records: Iterable[LogRecord]) -> bytes:
    return "".join(encode_record(r) + "\n" for r in records).encode("utf-8")


def decode_record(line: str, lineno: int) -> LogRecord:
    code = line.split(" ", 1)[0]
    pattern = _PATTERNS.get(code)
    if pattern is None:
        raise MalformedRecord(lineno, f"unknown record type {code!r}")
    match = pattern.fullmatch(line)
    if match is None:
        raise MalformedRecord(lineno, f"bad {code} record {line!r}")
    fields = match.groups()
    if code == "T":
        return CreateRecord(int(fields[0]), int(fields[1]), unquote_label(fields[2]))
    ints = [int(f) for f in fields]
    if code == "A":
        return AssociateRecord(*ints)
    if code == "RT":
        return RemoveThingRecord(*ints)
    return RemoveAssociationRecord(*ints)


def iter_records(data: bytes) -> Iterator[tuple[int, LogRecord]]:
    """Yield ``(line number, record)`` pairs from raw log bytes.

    A final line without its LF terminator is a torn write and is rejected.
    """
    if not data:
        return
    lines = data.split(b"\n")
    if lines[-1]:
        raise MalformedRecord(len(lines), "truncated record (missing line terminator)")
    for lineno, raw in enumerate(lines[:-1], start=1):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRecord(lineno, f"invalid UTF-8: {exc}") from None
        yield lineno, decode_record(text, lineno)


def read_records(source: BinaryIO | bytes) -> list[LogRecord]:
    """Parse a log without checking model invariants."""
    data = source if isinstance(source, bytes) else source.read()
    return [record for _, record in iter_records(data)]


def log_digest(records: Iterable[LogRecord]) -> str:
    """64-bit BLAKE2b digest of the canonical log, as 16 hex digits."""
    return hashlib.blake2b(encode_log(records), digest_size=8).hexdigest()


def write_log(model: Model, sink: BinaryIO) -> int:
    data = encode_log(model.records)
    try:
        sink.write(data)
    except OSError as exc:
        raise OSError(f"failed to write log: {exc}") from exc
    return len(data)


def replay(source: BinaryIO | bytes, *, strict_tree: bool = False) -> Model:
    """Rebuild a model by applying every record through the model's checks."""
    data = source if isinstance(source, bytes) else source.read()
    model = Model()
    for lineno, record in iter_records(data):
        try:
            model.apply(record)
        except InvariantViolation as exc:
            exc.line = lineno
            raise
    model.strict_tree = strict_tree
    return model


def load(path: str | Path, **kwargs) -> Model:
    return replay(Path(path).read_bytes(), **kwargs)


def save(model: Model, path: str | Path) -> int:
    with open(path, "wb") as fh:
        return write_log(model, fh)


def dumps(model: Model) -> bytes:
    buf = io.BytesIO()
    write_log(model, buf)
    return buf.getvalue()


def _dot_escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def render_dot(model: Model) -> str:
    lines = ["digraph cdm {"]
    for thing in sorted(model.alive_things(), key=lambda t: t.id):
        lines.append(f'  n{thing.id} [label="{_dot_escape(thing.label)}"];')
    for event in model.alive_events():
        lines.append(f'  n{event.member} -> n{event.owner} [label="t{event.tick}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(model: Model, sink: BinaryIO) -> int:
    data = render_dot(model).encode("utf-8")
    sink.write(data)
    return len(data)
