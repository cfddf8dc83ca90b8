"""Statement evaluation and result rendering.

Mutations go through the model and answer with the tick they were recorded
at; reads go through :mod:`cdm.query`. Labels resolve by exact match against
alive things only.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .. import query, relational, storage
from ..errors import CDMError, UnknownLabel
from ..model import Model
from . import ast
from .parser import parse_source


@dataclass(frozen=True)
class Ack:
    tick: int

    def lines(self) -> list[str]:
        return [f"ok {self.tick}"]

    def to_json(self) -> dict:
        return {"type": "ack", "tick": self.tick}


@dataclass(frozen=True)
class Names:
    names: tuple[str, ...]

    def lines(self) -> list[str]:
        return list(self.names)

    def to_json(self) -> dict:
        return {"type": "names", "names": list(self.names)}


@dataclass(frozen=True)
class PathsResult:
    source: str
    target: str
    paths: tuple[tuple[str, ...], ...]
    unique: bool
    truncated: bool

    def lines(self) -> list[str]:
        out = [" - ".join(p) for p in self.paths]
        summary = f"{len(self.paths)} path(s), unique: {'yes' if self.unique else 'no'}"
        if self.truncated:
            summary += ", truncated"
        return out + [summary]

    def to_json(self) -> dict:
        return {
            "type": "paths",
            "source": self.source,
            "target": self.target,
            "paths": [list(p) for p in self.paths],
            "unique": self.unique,
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class TraceResult:
    label: str
    entries: tuple[tuple[int, str, "str | None"], ...]

    def lines(self) -> list[str]:
        return [
            f"{tick} {kind}" + (f" {other}" if other is not None else "")
            for tick, kind, other in self.entries
        ]

    def to_json(self) -> dict:
        return {
            "type": "trace",
            "label": self.label,
            "entries": [
                {"tick": tick, "kind": kind, "counterpart": other}
                for tick, kind, other in self.entries
            ],
        }


@dataclass(frozen=True)
class Report:
    report: query.ValidationReport
    labels: dict

    def _name(self, thing_id) -> str:
        return self.labels.get(thing_id, str(thing_id))

    def warning_lines(self) -> list[str]:
        out = [
            "directed cycle: " + ", ".join(self._name(t) for t in cycle)
            for cycle in self.report.cycles
        ]
        out += [
            f"non-unique path: {self._name(a)} / {self._name(b)}"
            for a, b in self.report.non_unique_pairs
        ]
        out.append(f"components: {self.report.components}")
        return out

    def lines(self) -> list[str]:
        out = [f"errors: {len(self.report.errors)}"]
        out += [f"error: {v}" for v in self.report.errors]
        out += [f"warning: {w}" for w in self.warning_lines()]
        return out

    def to_json(self) -> dict:
        return {
            "type": "report",
            "errors": [str(v) for v in self.report.errors],
            "cycles": [[self._name(t) for t in c] for c in self.report.cycles],
            "non_unique_pairs": [
                [self._name(a), self._name(b)] for a, b in self.report.non_unique_pairs
            ],
            "components": self.report.components,
        }


@dataclass(frozen=True)
class Table:
    rows: tuple[tuple[str, object], ...]

    def lines(self) -> list[str]:
        return [f"{key}: {value}" for key, value in self.rows]

    def to_json(self) -> dict:
        return {"type": "table", "rows": dict(self.rows)}


ResultSet = Ack | Names | PathsResult | TraceResult | Report | Table


def is_mutation(stmt) -> bool:
    return isinstance(stmt, ast.MUTATION_TYPES)


def resolve(model: Model, label: str) -> int:
    thing_id = model.lookup(label)
    if thing_id is None:
        raise UnknownLabel(label)
    return thing_id


def _names(model: Model, ids) -> Names:
    return Names(tuple(sorted(model.thing(i).label for i in ids)))


def evaluate(
    model: Model,
    stmt,
    *,
    path_limit: int = query.DEFAULT_PATH_LIMIT,
    max_path_length: int = query.DEFAULT_MAX_PATH_LENGTH,
):
    """Run one statement against ``model`` and return its result set.

    Domain errors propagate with a ``position`` attribute naming the
    statement's location in its source, when known.
    """
    try:
        return _evaluate(model, stmt, path_limit, max_path_length)
    except CDMError as exc:
        if getattr(exc, "position", None) is None:
            exc.position = stmt.position
        raise


def _evaluate(model: Model, stmt, path_limit: int, max_path_length: int):
    if isinstance(stmt, ast.CreateThing):
        thing_id = model.create_thing(stmt.label)
        return Ack(model.thing(thing_id).created_at)
    if isinstance(stmt, ast.Assoc):
        member, owner = resolve(model, stmt.member), resolve(model, stmt.owner)
        return Ack(model.associate(member, owner).tick)
    if isinstance(stmt, ast.DropThing):
        model.remove_thing(resolve(model, stmt.label))
        return Ack(model.clock - 1)
    if isinstance(stmt, ast.DropAssoc):
        member, owner = resolve(model, stmt.member), resolve(model, stmt.owner)
        return Ack(model.remove_association(member, owner))

    if isinstance(stmt, ast.Owners):
        return _names(model, query.owners_of(model, resolve(model, stmt.label)))
    if isinstance(stmt, ast.Members):
        return _names(model, query.members_of(model, resolve(model, stmt.label)))
    if isinstance(stmt, ast.Reach):
        return _names(model, query.reachable(model, resolve(model, stmt.label), stmt.direction))
    if isinstance(stmt, ast.Paths):
        report = query.paths(
            model,
            resolve(model, stmt.source),
            resolve(model, stmt.target),
            limit=path_limit,
            max_length=max_path_length,
        )
        labelled = tuple(tuple(model.thing(i).label for i in p) for p in report.paths)
        return PathsResult(stmt.source, stmt.target, labelled, report.unique, report.truncated)
    if isinstance(stmt, ast.Trace):
        entries = tuple(
            (
                e.tick,
                e.kind.value,
                model.thing(e.counterpart).label if e.counterpart is not None else None,
            )
            for e in query.trace(model, resolve(model, stmt.label))
        )
        return TraceResult(stmt.label, entries)
    if isinstance(stmt, ast.AsOf):
        snapshot = query.as_of(model, stmt.tick)
        return _evaluate(snapshot, stmt.inner, path_limit, max_path_length)

    if isinstance(stmt, ast.Validate):
        labels = {t.id: t.label for t in model.things.values()}
        return Report(query.validate(model), labels)
    if isinstance(stmt, ast.Stats):
        return Table(tuple(query.stats(model).as_dict().items()))
    if isinstance(stmt, ast.ExportDot):
        with open(stmt.path, "wb") as fh:
            size = storage.export_dot(model, fh)
        return Table((("path", stmt.path), ("bytes", size)))
    if isinstance(stmt, ast.ExportSql):
        data = relational.emit_sql(relational.to_relational(model)).encode("utf-8")
        Path(stmt.path).write_bytes(data)
        return Table((("path", stmt.path), ("bytes", len(data))))
    raise TypeError(f"not a statement: {stmt!r}")


def execute(model: Model, source: str, **kwargs) -> list:
    """Parse and evaluate a whole script, stopping at the first error."""
    return [evaluate(model, stmt, **kwargs) for stmt in parse_source(source)]
