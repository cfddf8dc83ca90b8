"""Statement nodes of the CDM query language.

``position`` records where a statement started in its source; it takes no
part in equality so that formatted and re-parsed statements compare equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union



@dataclass(frozen=True)
class CreateThing:
    label: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Assoc:
    member: str
    owner: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DropThing:
    label: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DropAssoc:
    member: str
    owner: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Owners:
    label: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Members:
    label: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Reach:
    label: str
    direction: str  # "UP", "DOWN" or "ANY"
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Paths:
    source: str
    target: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Trace:
    label: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AsOf:
    tick: int
    inner: "Query"
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Validate:
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Stats:
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ExportDot:
    path: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ExportSql:
    path: str
    position: tuple[int, int] | None = field(default=None, compare=False, repr=False)


Query = Union[Owners, Members, Reach, Paths, Trace]
Mutation = Union[CreateThing, Assoc, DropThing, DropAssoc]
Statement = Union[
    CreateThing, Assoc, DropThing, DropAssoc, Owners, Members, Reach, Paths,
    Trace, AsOf, Validate, Stats, ExportDot, ExportSql,
]

QUERY_TYPES = (Owners, Members, Reach, Paths, Trace)
MUTATION_TYPES = (CreateThing, Assoc, DropThing, DropAssoc)
