"""CDM <-> relational mapping: a ``thing`` table and an ``association`` table.

The export is a present-state projection: tombstoned things and events are
left out. Unknown facts (say, the colour of a toaster) are simply absent rows,
so no column is ever nullable and the emitted SQL never mentions NULL. Columns
are guarded with ``CHECK ((col = col) IS TRUE)``, which rejects a missing value
exactly like a not-null constraint would.

:func:`ingest_sql` reads back only the exact dialect :func:`emit_sql` writes.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .errors import CDMError, DialectError, IntegrityError
from .model import AssociateRecord, CreateRecord, Model


class ThingRow(NamedTuple):
    id: int
    label: str
    created_tick: int


class AssocRow(NamedTuple):
    tick: int
    member_id: int
    owner_id: int


class RelationalBundle(NamedTuple):
    thing_rows: tuple[ThingRow, ...] = ()
    assoc_rows: tuple[AssocRow, ...] = ()


SCHEMA = """\
CREATE TABLE thing (
    id INTEGER PRIMARY KEY CHECK ((id = id) IS TRUE),
    label TEXT UNIQUE CHECK ((label = label) IS TRUE),
    created_tick INTEGER CHECK ((created_tick = created_tick) IS TRUE)
);
CREATE TABLE association (
    tick INTEGER PRIMARY KEY CHECK ((tick = tick) IS TRUE),
    member_id INTEGER REFERENCES thing (id) CHECK ((member_id = member_id) IS TRUE),
    owner_id INTEGER REFERENCES thing (id) CHECK ((owner_id = owner_id) IS TRUE),
    CHECK (member_id <> owner_id),
    UNIQUE (member_id, owner_id)
);
"""


def to_relational(model: Model) -> RelationalBundle:
    things = sorted(model.alive_things(), key=lambda t: t.created_at)
    return RelationalBundle(
        tuple(ThingRow(t.id, t.label, t.created_at) for t in things),
        tuple(AssocRow(e.tick, e.member, e.owner) for e in model.alive_events()),
    )


def sql_string(text: str) -> str:
    return "'" + text.replace("'", "''") + "'"


def emit_sql(bundle: RelationalBundle) -> str:
    """DDL followed by one INSERT per row, rows interleaved in tick order."""
    rows: list[tuple[int, str]] = []
    for t in bundle.thing_rows:
        rows.append((
            t.created_tick,
            f"INSERT INTO thing (id, label, created_tick) VALUES ({t.id}, {sql_string(t.label)}, {t.created_tick});",
        ))
    for a in bundle.assoc_rows:
        rows.append((
            a.tick,
            f"INSERT INTO association (tick, member_id, owner_id) VALUES ({a.tick}, {a.member_id}, {a.owner_id});",
        ))
    rows.sort(key=lambda r: r[0])
    return SCHEMA + "".join(stmt + "\n" for _, stmt in rows)


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<str>'(?:[^']|'')*')"
    r"|(?P<int>-?[0-9]+)"
    r"|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><>|[(),;=])"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    line = 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DialectError(line, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind == "word":
            value = value.upper()
        if kind != "ws":
            tokens.append((kind, value, line))
        line += m.group().count("\n")
        pos = m.end()
    return tokens


_SCHEMA_TOKENS = [(kind, value) for kind, value, _ in _tokenize(SCHEMA)]
_THING_INSERT = [("word", w) for w in "INSERT INTO THING".split()] + [
    ("op", "("), ("word", "ID"), ("op", ","), ("word", "LABEL"), ("op", ","),
    ("word", "CREATED_TICK"), ("op", ")"), ("word", "VALUES"), ("op", "("),
    ("int", None), ("op", ","), ("str", None), ("op", ","), ("int", None),
    ("op", ")"), ("op", ";"),
]
_ASSOC_INSERT = [("word", w) for w in "INSERT INTO ASSOCIATION".split()] + [
    ("op", "("), ("word", "TICK"), ("op", ","), ("word", "MEMBER_ID"), ("op", ","),
    ("word", "OWNER_ID"), ("op", ")"), ("word", "VALUES"), ("op", "("),
    ("int", None), ("op", ","), ("int", None), ("op", ","), ("int", None),
    ("op", ")"), ("op", ";"),
]


def _match(tokens, pos, shape) -> list[str]:
    """Match ``shape`` at ``pos``; ``None`` values capture the literal."""
    captured = []
    for kind, value in shape:
        if pos >= len(tokens):
            last = tokens[-1][2] if tokens else 1
            raise DialectError(last, "unexpected end of input")
        tkind, tvalue, line = tokens[pos]
        if tkind != kind or (value is not None and tvalue != value):
            raise DialectError(line, f"unexpected {tvalue!r}")
        if value is None:
            captured.append(tvalue)
        pos += 1
    return captured


def ingest_sql(text: str) -> Model:
    """Rebuild a model from SQL written by :func:`emit_sql`.

    Raises :class:`DialectError` for anything outside that dialect and
    :class:`IntegrityError` for dangling references or duplicate keys.
    """
    tokens = _tokenize(text)
    _match(tokens, 0, _SCHEMA_TOKENS)
    pos = len(_SCHEMA_TOKENS)
    records: list[tuple[int, int, object]] = []
    while pos < len(tokens):
        _, word, line = tokens[pos]
        target = tokens[pos + 2][1] if pos + 2 < len(tokens) else None
        if word == "INSERT" and target == "THING":
            id_, label, tick = _match(tokens, pos, _THING_INSERT)
            label = label[1:-1].replace("''", "'")
            records.append((int(tick), line, CreateRecord(int(tick), int(id_), label)))
            pos += len(_THING_INSERT)
        elif word == "INSERT" and target == "ASSOCIATION":
            tick, member, owner = _match(tokens, pos, _ASSOC_INSERT)
            records.append((int(tick), line, AssociateRecord(int(tick), int(member), int(owner))))
            pos += len(_ASSOC_INSERT)
        else:
            raise DialectError(line, f"unexpected {word!r}")

    ids = [r.id for _, _, r in records if isinstance(r, CreateRecord)]
    if len(ids) != len(set(ids)):
        raise IntegrityError("duplicate thing id")
    ticks = [t for t, _, _ in records]
    if len(ticks) != len(set(ticks)):
        raise IntegrityError("duplicate tick")
    known = set(ids)
    for _, line, record in records:
        if isinstance(record, AssociateRecord):
            for ref in (record.member, record.owner):
                if ref not in known:
                    raise IntegrityError(f"line {line}: association references unknown thing {ref}")

    model = Model()
    for _, line, record in sorted(records, key=lambda r: r[0]):
        try:
            model.apply(record)
        except CDMError as exc:
            raise IntegrityError(f"line {line}: {exc}") from exc
    return model
