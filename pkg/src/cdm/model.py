"""Core CDM aggregate: things, association events and the logical clock.

The model is an append-only log of records. Every state change (creating a
thing, associating two things, tombstoning either) occupies its own tick of a
single global clock, so no two changes ever happen "at the same time". The
in-memory indexes are a pure function of that log; :meth:`Model.apply` is the
only place state changes, and it is used both by the public mutation methods
and by log replay.
"""
from __future__ import annotations

import functools
import threading
from collections import defaultdict, deque
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import (
    STEP_PAIRWISE,
    STEP_THING,
    ConcurrentMutation,
    DuplicateAssociation,
    DuplicateLabel,
    EmptyLabel,
    FrozenSnapshot,
    InvariantViolation,
    NoSuchAssociation,
    SelfAssociation,
    StrictTreeViolation,
    TickOrderViolation,
    UnknownThing,
)

ThingId = int
Tick = int


@dataclass(frozen=True)
class Thing:
    id: ThingId
    label: str
    created_at: Tick
    alive: bool = True


@dataclass(frozen=True)
class AssociationEvent:
    """One directed member -> owner association.

    The member determines the owner; the owner qualifies the member.
    """

    tick: Tick
    member: ThingId
    owner: ThingId
    alive: bool = True

    @property
    def pair(self) -> tuple[ThingId, ThingId]:
        return (self.member, self.owner)


@dataclass(frozen=True)
class VersionRef:
    """A thing as it stood at a given tick."""

    thing: ThingId
    as_of: Tick


# Log records. ``code`` is the record tag used by the text log format.


@dataclass(frozen=True)
class CreateRecord:
    tick: Tick
    id: ThingId
    label: str
    code = "T"


@dataclass(frozen=True)
class AssociateRecord:
    tick: Tick
    member: ThingId
    owner: ThingId
    code = "A"


@dataclass(frozen=True)
class RemoveThingRecord:
    tick: Tick
    id: ThingId
    code = "RT"


@dataclass(frozen=True)
class RemoveAssociationRecord:
    tick: Tick
    member: ThingId
    owner: ThingId
    code = "RA"


LogRecord = Union[CreateRecord, AssociateRecord, RemoveThingRecord, RemoveAssociationRecord]


def _mutation(method):
    """Serialize mutations: at most one in flight, never on a snapshot."""

    @functools.wraps(method)
    def wrapper(self: "Model", *args, **kwargs):
        if self._frozen:
            raise FrozenSnapshot("snapshots are read-only")
        if not self._lock.acquire(blocking=False):
            raise ConcurrentMutation("another mutation is in progress on this model")
        try:
            return method(self, *args, **kwargs)
        finally:
            self._lock.release()

    return wrapper


class Model:
    """In-memory CDM rebuilt deterministically from its record log."""

    def __init__(self, *, strict_tree: bool = False):
        self.strict_tree = strict_tree
        self._records: list[LogRecord] = []
        self._things: dict[ThingId, Thing] = {}
        self._events: dict[Tick, AssociationEvent] = {}
        self._alive_pairs: dict[tuple[ThingId, ThingId], Tick] = {}
        self._labels: dict[str, ThingId] = {}
        self._owners: defaultdict[ThingId, set[ThingId]] = defaultdict(set)
        self._members: defaultdict[ThingId, set[ThingId]] = defaultdict(set)
        self._clock: Tick = 0
        self._next_id: ThingId = 1
        self._lock = threading.Lock()
        self._frozen = False

    @classmethod
    def from_records(cls, records: Iterable[LogRecord], *, frozen: bool = False) -> "Model":
        model = cls()
        for record in records:
            model.apply(record)
        model._frozen = frozen
        return model

    # -- read surface -------------------------------------------------------

    @property
    def clock(self) -> Tick:
        """Next tick to be issued."""
        return self._clock

    @property
    def frozen(self) -> bool:
        return self._frozen

    @property
    def records(self) -> tuple[LogRecord, ...]:
        return tuple(self._records)

    @property
    def things(self) -> Mapping[ThingId, Thing]:
        return MappingProxyType(self._things)

    @property
    def events(self) -> tuple[AssociationEvent, ...]:
        # dict preserves insertion order, which is tick order
        return tuple(self._events.values())

    def current_tick(self) -> Tick:
        return self._clock

    def thing(self, thing_id: ThingId) -> Thing:
        try:
            return self._things[thing_id]
        except KeyError:
            raise UnknownThing(f"unknown thing id {thing_id}") from None

    def alive_thing(self, thing_id: ThingId) -> Thing:
        thing = self._things.get(thing_id)
        if thing is None or not thing.alive:
            raise UnknownThing(f"no alive thing with id {thing_id}")
        return thing

    def lookup(self, label: str) -> ThingId | None:
        """Id of the alive thing carrying ``label`` exactly, if any."""
        return self._labels.get(label)

    def alive_things(self) -> list[Thing]:
        return [t for t in self._things.values() if t.alive]

    def alive_events(self) -> list[AssociationEvent]:
        return [e for e in self._events.values() if e.alive]

    def alive_pairs(self) -> frozenset[tuple[ThingId, ThingId]]:
        return frozenset(self._alive_pairs)

    def owners(self, thing_id: ThingId) -> frozenset[ThingId]:
        return frozenset(self._owners.get(thing_id, ()))

    def members(self, thing_id: ThingId) -> frozenset[ThingId]:
        return frozenset(self._members.get(thing_id, ()))

    def neighbours(self, thing_id: ThingId) -> frozenset[ThingId]:
        return self.owners(thing_id) | self.members(thing_id)

    def snapshot(self) -> "Model":
        """Immutable copy; later mutations of ``self`` never reach it."""
        return Model.from_records(self._records, frozen=True)

    def state_hash(self) -> str:
        from .storage import log_digest

        return log_digest(self._records)

    # -- mutations ----------------------------------------------------------

    @_mutation
    def create_thing(self, label: str) -> ThingId:
        thing_id = self._next_id
        self.apply(CreateRecord(self._clock, thing_id, label))
        return thing_id

    @_mutation
    def associate(self, member: ThingId, owner: ThingId) -> AssociationEvent:
        record = AssociateRecord(self._clock, member, owner)
        self._check(record)
        if self.strict_tree and self._connected(member, owner):
            raise StrictTreeViolation(
                f"associating {member} -> {owner} would close an undirected cycle"
            )
        self.apply(record)
        return self._events[record.tick]

    @_mutation
    def remove_association(self, member: ThingId, owner: ThingId) -> Tick:
        record = RemoveAssociationRecord(self._clock, member, owner)
        self.apply(record)
        return record.tick

    @_mutation
    def remove_thing(self, thing_id: ThingId) -> int:
        """Tombstone a thing after tombstoning its incident events.

        Incident events are removed in ascending order of their original
        tick, each at its own fresh tick, then the thing itself.
        """
        self.alive_thing(thing_id)
        incident = sorted(
            tick
            for pair, tick in self._alive_pairs.items()
            if thing_id in pair
        )
        for tick in incident:
            event = self._events[tick]
            self.apply(RemoveAssociationRecord(self._clock, event.member, event.owner))
        self.apply(RemoveThingRecord(self._clock, thing_id))
        return len(incident)

    # -- the single state transition ---------------------------------------

    def apply(self, record: LogRecord) -> None:
        """Validate ``record`` against the current state and append it.

        Either the whole record applies or nothing changes.
        """
        if self._frozen:
            raise FrozenSnapshot("snapshots are read-only")
        self._check(record)
        tick = record.tick
        if isinstance(record, CreateRecord):
            self._things[record.id] = Thing(record.id, record.label, tick)
            self._labels[record.label] = record.id
            self._next_id = max(self._next_id, record.id + 1)
        elif isinstance(record, AssociateRecord):
            self._events[tick] = AssociationEvent(tick, record.member, record.owner)
            self._alive_pairs[(record.member, record.owner)] = tick
            self._owners[record.member].add(record.owner)
            self._members[record.owner].add(record.member)
        elif isinstance(record, RemoveAssociationRecord):
            pair = (record.member, record.owner)
            original = self._alive_pairs.pop(pair)
            self._events[original] = replace(self._events[original], alive=False)
            self._owners[record.member].discard(record.owner)
            self._members[record.owner].discard(record.member)
        elif isinstance(record, RemoveThingRecord):
            thing = self._things[record.id]
            self._things[record.id] = replace(thing, alive=False)
            del self._labels[thing.label]
            self._owners.pop(record.id, None)
            self._members.pop(record.id, None)
        self._records.append(record)
        self._clock = tick + 1

    def _check(self, record: LogRecord) -> None:
        tick = record.tick
        if not isinstance(tick, int) or tick < 0:
            raise TickOrderViolation(f"tick {tick!r} is not a non-negative integer")
        if self._records:
            last = self._records[-1].tick
            if tick == last:
                raise TickOrderViolation(f"duplicate tick {tick}")
            if tick < last:
                raise TickOrderViolation(f"tick {tick} is not after previous tick {last}")

        if isinstance(record, CreateRecord):
            if not isinstance(record.label, str) or not record.label.strip():
                raise EmptyLabel("thing label must not be empty")
            if record.id < 1 or record.id in self._things:
                raise InvariantViolation(f"thing id {record.id} is not fresh", step=STEP_THING)
            if record.label in self._labels:
                raise DuplicateLabel(f"an alive thing is already labelled {record.label!r}")
        elif isinstance(record, AssociateRecord):
            if record.member == record.owner:
                raise SelfAssociation(
                    f"thing {record.member} cannot be both member and owner of one association"
                )
            self.alive_thing(record.member)
            self.alive_thing(record.owner)
            if (record.member, record.owner) in self._alive_pairs:
                raise DuplicateAssociation(
                    f"{record.member} -> {record.owner} is already associated"
                )
        elif isinstance(record, RemoveAssociationRecord):
            if (record.member, record.owner) not in self._alive_pairs:
                raise NoSuchAssociation(
                    f"no alive association {record.member} -> {record.owner}"
                )
        elif isinstance(record, RemoveThingRecord):
            self.alive_thing(record.id)
            if self._owners.get(record.id) or self._members.get(record.id):
                raise UnknownThing(
                    f"thing {record.id} still has alive associations",
                    step=STEP_PAIRWISE,
                )
        else:
            raise TypeError(f"not a log record: {record!r}")

    def _connected(self, a: ThingId, b: ThingId) -> bool:
        seen = {a}
        queue = deque([a])
        while queue:
            node = queue.popleft()
            if node == b:
                return True
            for nxt in self.neighbours(node):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return False

    # -- structural equality ------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Model):
            return NotImplemented
        return self._records == other._records

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        alive = sum(t.alive for t in self._things.values())
        return f"<Model things={alive}/{len(self._things)} events={len(self._alive_pairs)}/{len(self._events)} clock={self._clock}>"


def create_thing(model: Model, label: str) -> ThingId:
    return model.create_thing(label)


def associate(model: Model, member: ThingId, owner: ThingId) -> AssociationEvent:
    return model.associate(member, owner)


def remove_association(model: Model, member: ThingId, owner: ThingId) -> Tick:
    return model.remove_association(member, owner)


def remove_thing(model: Model, thing_id: ThingId) -> int:
    return model.remove_thing(thing_id)


def current_tick(model: Model) -> Tick:
    return model.current_tick()


def state_hash(model: Model) -> str:
    return model.state_hash()
