"""Exception types shared across the harness.

Every module raises subclasses of SocialBenchError so callers (and the CLI)
can catch harness failures without swallowing genuine bugs.
"""

from __future__ import annotations


class SocialBenchError(Exception):
    """Base class for all harness errors."""


class ConfigInvalid(SocialBenchError):
    """A configuration value is out of range or inconsistent."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"invalid config field {field!r}: {reason}")


class CycleDetected(SocialBenchError):
    """A reply chain loops back on itself instead of terminating at a post."""


class ParseError(SocialBenchError):
    """A serialized file could not be parsed; carries file and line number."""

    def __init__(self, path: str, line_no: int, reason: str):
        self.path = path
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"{path}:{line_no}: {reason}")


class UnsatisfiableDependency(SocialBenchError):
    """An operation cannot be scheduled with the required safety margin."""


class NoQualifyingGroup(SocialBenchError):
    """Window selection found no frequency group of the required size."""


class InsufficientPairs(SocialBenchError):
    """Path curation found fewer qualifying person pairs than requested."""

    def __init__(self, requested: int, found: int, detail: str = ""):
        self.requested = requested
        self.found = found
        msg = f"requested {requested} pairs, found {found}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class MissingBucket(SocialBenchError):
    """A scheduled read lands on a day with no curated parameters."""


class UnknownEntity(SocialBenchError):
    """An operation referenced an entity that is not alive in the store."""


class UnknownPerson(UnknownEntity):
    pass


class UnknownMessage(UnknownEntity):
    pass


class DependencyMissing(SocialBenchError):
    """An insert referenced an entity that has not been created yet."""


class IntegrityError(SocialBenchError):
    """Bulk-loaded data contains dangling references or duplicates."""


class SutError(SocialBenchError):
    """The system under test raised while executing an operation."""


class DeadlockSuspected(SocialBenchError):
    """An update was deferred far beyond the safety horizon; the stream is
    likely corrupt or the dependency clock is wedged."""


class ValidationFailed(SocialBenchError):
    """Cross-validation observed diverging results between two systems."""

    def __init__(self, variant: str, detail: str):
        self.variant = variant
        self.detail = detail
        super().__init__(f"divergence on {variant}: {detail}")


class StageFailed(SocialBenchError):
    """A pipeline stage raised; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
