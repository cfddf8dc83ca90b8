"""Read-only graph, temporal and validation queries over a model.

Adjacency queries only see alive things and events. History queries
(:func:`as_of`, :func:`trace`) also see tombstoned ones.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .errors import InvariantViolation, SameThing, UnknownThing
from .model import (
    AssociateRecord,
    CreateRecord,
    LogRecord,
    Model,
    RemoveAssociationRecord,
    RemoveThingRecord,
    ThingId,
    Tick,
)

DEFAULT_PATH_LIMIT = 64
DEFAULT_MAX_PATH_LENGTH = 32


class Direction(enum.Enum):
    UP = "up"  # member -> owner
    DOWN = "down"  # owner -> member
    ANY = "any"

    @classmethod
    def parse(cls, value: "str | Direction") -> "Direction":
        if isinstance(value, cls):
            return value
        aliases = {"upward": "up", "downward": "down", "undirected": "any"}
        text = str(value).lower()
        return cls(aliases.get(text, text))


class TraceKind(str, enum.Enum):
    CREATED = "created"
    BECAME_MEMBER = "became-member"
    BECAME_OWNER = "became-owner"
    EVENT_TOMBSTONED = "event-tombstoned"
    REMOVED = "removed"


@dataclass(frozen=True)
class TraceEntry:
    tick: Tick
    kind: TraceKind
    counterpart: ThingId | None = None


@dataclass(frozen=True)
class PathReport:
    endpoints: tuple[ThingId, ThingId]
    paths: tuple[tuple[ThingId, ...], ...]
    truncated: bool = False

    @property
    def unique(self) -> bool:
        return len(self.paths) == 1


@dataclass(frozen=True)
class Violation:
    """A hard-invariant breach found in a raw record sequence."""

    index: int  # 1-based position in the log, i.e. the line number
    tick: object
    step: str
    message: str

    def __str__(self) -> str:
        return f"record {self.index} (tick {self.tick}): {self.message} [{self.step}]"


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[Violation, ...] = ()
    cycles: tuple[tuple[ThingId, ...], ...] = ()
    non_unique_pairs: tuple[tuple[ThingId, ThingId], ...] = ()
    components: int = 0

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def warnings(self) -> list[str]:
        out = [f"directed cycle among things {list(c)}" for c in self.cycles]
        out += [f"non-unique path between things {a} and {b}" for a, b in self.non_unique_pairs]
        if self.components > 1:
            out.append(f"{self.components} disconnected components")
        return out


@dataclass(frozen=True)
class Stats:
    things_alive: int
    things_total: int
    events_alive: int
    events_total: int
    clock: Tick
    components: int
    max_path_length: int

    def as_dict(self) -> dict[str, int]:
        return {
            "things_alive": self.things_alive,
            "things_total": self.things_total,
            "events_alive": self.events_alive,
            "events_total": self.events_total,
            "clock": self.clock,
            "components": self.components,
            "max_path_length": self.max_path_length,
        }


def owners_of(model: Model, thing_id: ThingId) -> frozenset[ThingId]:
    model.alive_thing(thing_id)
    return model.owners(thing_id)


def members_of(model: Model, thing_id: ThingId) -> frozenset[ThingId]:
    model.alive_thing(thing_id)
    return model.members(thing_id)


def reachable(model: Model, thing_id: ThingId, direction: "str | Direction" = Direction.UP) -> frozenset[ThingId]:
    """Transitive closure from ``thing_id``, excluding the start itself."""
    model.alive_thing(thing_id)
    direction = Direction.parse(direction)
    step = {
        Direction.UP: model.owners,
        Direction.DOWN: model.members,
        Direction.ANY: model.neighbours,
    }[direction]
    seen = {thing_id}
    queue = deque([thing_id])
    while queue:
        for nxt in step(queue.popleft()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    seen.discard(thing_id)
    return frozenset(seen)


def paths(
    model: Model,
    a: ThingId,
    b: ThingId,
    *,
    limit: int = DEFAULT_PATH_LIMIT,
    max_length: int = DEFAULT_MAX_PATH_LENGTH,
) -> PathReport:
    """All simple undirected paths from ``a`` to ``b``, in lexicographic order.

    Depth-first search visiting neighbours in ascending id order yields paths
    already sorted. Enumeration stops after ``limit`` paths, and paths longer
    than ``max_length`` edges are not followed; either cut sets ``truncated``.
    """
    if limit < 1 or max_length < 1:
        raise ValueError("limit and max_length must be positive")
    model.alive_thing(a)
    model.alive_thing(b)
    if a == b:
        raise SameThing(f"path endpoints must differ (both {a})")

    found: list[tuple[ThingId, ...]] = []
    truncated = False
    path = [a]
    on_path = {a}
    # explicit stack of neighbour iterators keeps deep graphs off the C stack
    stack = [iter(sorted(model.neighbours(a)))]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        if nxt == b:
            if len(found) == limit:
                truncated = True
                break
            found.append(tuple(path) + (b,))
            continue
        if len(path) >= max_length:
            # a further vertex plus at least one more edge would exceed the cap
            truncated = True
            continue
        path.append(nxt)
        on_path.add(nxt)
        stack.append(iter(sorted(model.neighbours(nxt))))
    return PathReport((a, b), tuple(found), truncated)


def as_of(model: Model, tick: Tick) -> Model:
    """Read-only model rebuilt from the records with tick <= ``tick``."""
    if tick < 0:
        raise ValueError("tick must be non-negative")
    return Model.from_records((r for r in model.records if r.tick <= tick), frozen=True)


def trace(model: Model, thing_id: ThingId) -> list[TraceEntry]:
    model.thing(thing_id)
    entries = []
    for record in model.records:
        if isinstance(record, CreateRecord):
            if record.id == thing_id:
                entries.append(TraceEntry(record.tick, TraceKind.CREATED))
        elif isinstance(record, AssociateRecord):
            if record.member == thing_id:
                entries.append(TraceEntry(record.tick, TraceKind.BECAME_MEMBER, record.owner))
            elif record.owner == thing_id:
                entries.append(TraceEntry(record.tick, TraceKind.BECAME_OWNER, record.member))
        elif isinstance(record, RemoveAssociationRecord):
            if thing_id in (record.member, record.owner):
                other = record.owner if record.member == thing_id else record.member
                entries.append(TraceEntry(record.tick, TraceKind.EVENT_TOMBSTONED, other))
        elif isinstance(record, RemoveThingRecord):
            if record.id == thing_id:
                entries.append(TraceEntry(record.tick, TraceKind.REMOVED))
    return entries


def audit_records(records: Iterable[LogRecord]) -> list[Violation]:
    """Every hard-invariant violation in a raw record sequence.

    Records are applied one by one to a scratch model; a record that fails is
    reported and skipped so the scan continues past it.
    """
    scratch = Model()
    found = []
    for index, record in enumerate(records, start=1):
        try:
            scratch.apply(record)
        except InvariantViolation as exc:
            found.append(Violation(index, record.tick, exc.step, exc.message))
    return found


def undirected_graph(model: Model) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(t.id for t in model.alive_things())
    graph.add_edges_from(model.alive_pairs())
    return graph


def non_unique_pairs(model: Model) -> list[tuple[ThingId, ThingId]]:
    """Connected pairs joined by more than one simple undirected path.

    Two vertices have exactly one simple path iff they are connected through
    bridges alone, so we compare components of the graph against components
    of its bridge-only subgraph.
    """
    graph = undirected_graph(model)
    bridge_forest = nx.Graph()
    bridge_forest.add_nodes_from(graph)
    bridge_forest.add_edges_from(nx.bridges(graph))
    bridge_comp = {}
    for index, comp in enumerate(nx.connected_components(bridge_forest)):
        for node in comp:
            bridge_comp[node] = index
    pairs = []
    for comp in nx.connected_components(graph):
        nodes = sorted(comp)
        for i, a in enumerate(nodes):
            for b in nodes[i + 1:]:
                if bridge_comp[a] != bridge_comp[b]:
                    pairs.append((a, b))
    return sorted(pairs)


def validate(subject: "Model | Sequence[LogRecord]") -> ValidationReport:
    """Hard-invariant errors plus structural warnings.

    ``subject`` may be a model or a raw record sequence (for example one read
    with :func:`cdm.storage.read_records` from a hand-edited file). Warnings
    are computed on the model obtained by applying the valid records.
    """
    records = list(subject.records if isinstance(subject, Model) else subject)
    errors = audit_records(records)
    if isinstance(subject, Model):
        model = subject
    else:
        model = Model()
        for record in records:
            try:
                model.apply(record)
            except InvariantViolation:
                pass
    digraph = nx.DiGraph()
    digraph.add_edges_from(model.alive_pairs())
    cycles = sorted(
        tuple(sorted(c)) for c in nx.strongly_connected_components(digraph) if len(c) > 1
    )
    graph = undirected_graph(model)
    return ValidationReport(
        errors=tuple(errors),
        cycles=tuple(cycles),
        non_unique_pairs=tuple(non_unique_pairs(model)),
        components=nx.number_connected_components(graph),
    )


def stats(model: Model) -> Stats:
    """Counts over the model; ``max_path_length`` is the largest diameter, in
    edges, over the connected components."""
    graph = undirected_graph(model)
    diameter = 0
    for comp in nx.connected_components(graph):
        if len(comp) > 1:
            diameter = max(diameter, nx.diameter(graph.subgraph(comp)))
    events = model.events
    return Stats(
        things_alive=graph.number_of_nodes(),
        things_total=len(model.things),
        events_alive=sum(e.alive for e in events),
        events_total=len(events),
        clock=model.clock,
        components=nx.number_connected_components(graph),
        max_path_length=diameter,
    )
