"""Embedded Cognitive Data Model engine.

Things are atomic named data items; the only relationship is a directed
member -> owner association, and every change to the model is an event at
its own tick of a global logical clock.
"""
from .errors import CDMError, InvariantViolation
from .model import (
    AssociationEvent,
    Model,
    Thing,
    VersionRef,
    associate,
    create_thing,
    current_tick,
    remove_association,
    remove_thing,
    state_hash,
)
from .query import (
    Direction,
    PathReport,
    ValidationReport,
    as_of,
    members_of,
    owners_of,
    paths,
    reachable,
    stats,
    trace,
    validate,
)
from .storage import export_dot, load, replay, save, write_log

__version__ = "0.1.0"
