"""Exception hierarchy for the CDM engine.

Every rule violation carries the framework step it breaks, so a rejected log
line or mutation can be traced back to the rule that forbids it.
"""
from __future__ import annotations

# Identifiers of the five framework rules enforced by the model.
STEP_THING = "Step (1)"
STEP_KNOWLEDGE = "Step (2)-(a)"
STEP_UNIDIRECTIONAL = "Step (2)-(c)"
STEP_PAIRWISE = "Step (4)-(a)"
STEP_SEQUENTIAL = "Step (4)-(c)"
STEP_SEPARATE_EVENTS = "Step (5)"


class CDMError(Exception):
    """Base class for all domain errors raised by the engine."""


class InvariantViolation(CDMError):
    """A mutation or log record would break one of the framework rules.

    ``line`` is filled in by the log reader when the violation comes from a
    serialized record.
    """

    step = STEP_THING

    def __init__(self, message: str, *, step: str | None = None, line: int | None = None):
        super().__init__(message)
        self.message = message
        if step is not None:
            self.step = step
        self.line = line

    def __str__(self) -> str:
        prefix = f"line {self.line}: " if self.line is not None else ""
        return f"{prefix}{self.message} [{self.step}]"


class EmptyLabel(InvariantViolation):
    step = STEP_THING


class DuplicateLabel(InvariantViolation):
    step = STEP_THING


class SelfAssociation(InvariantViolation):
    step = STEP_PAIRWISE


class UnknownThing(InvariantViolation):
    step = STEP_PAIRWISE


class DuplicateAssociation(InvariantViolation):
    step = STEP_KNOWLEDGE


class NoSuchAssociation(InvariantViolation):
    step = STEP_UNIDIRECTIONAL


class TickOrderViolation(InvariantViolation):
    step = STEP_SEQUENTIAL


class StrictTreeViolation(CDMError):
    """Raised in strict-tree mode when an association would close an undirected cycle."""


class ConcurrentMutation(CDMError):
    """Another mutation is already in flight on the same model."""


class FrozenSnapshot(CDMError):
    """Mutation attempted on a read-only snapshot."""


class SameThing(CDMError):
    pass


class MalformedRecord(CDMError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: malformed record: {reason}")
        self.line = line
        self.reason = reason


class UnknownLabel(CDMError):
    def __init__(self, label: str):
        super().__init__(f"unknown label: {label}")
        self.label = label


class DialectError(CDMError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: unsupported SQL: {reason}")
        self.line = line


class IntegrityError(CDMError):
    pass
