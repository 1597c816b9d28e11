"""Exception hierarchy shared across the opbench pipeline.

Every error raised on a user-facing path derives from OpbenchError so the
CLI can map failures to exit codes without pattern matching on messages.
"""


class OpbenchError(Exception):
    """Base class for all opbench errors."""


class SchemaError(OpbenchError):
    """A file is malformed: bad JSON, missing field, or wrong field type."""


class ValidationError(OpbenchError):
    """Structurally well-formed data violates a semantic invariant."""


class IoError(OpbenchError):
    """A file could not be read or written."""


class VersionError(SchemaError):
    """A versioned file carries an unknown version string."""


class AttributionError(ValidationError):
    """Trace events on one thread overlap without nesting."""


class ShapeMismatch(OpbenchError):
    """Kernel operands have incompatible shapes or dtypes."""


class BadAttr(OpbenchError):
    """A kernel attribute is missing, out of range, or ill-typed."""


class ExecError(OpbenchError):
    """A graph node failed during execution; carries the node id."""

    def __init__(self, node_id: str, message: str):
        super().__init__(f"node '{node_id}': {message}")
        self.node_id = node_id


class InputMismatch(OpbenchError):
    """Supplied graph inputs do not cover or match the declared specs."""


class UnrunnableSpec(OpbenchError):
    """A microbenchmark spec names an operator with no reference kernel."""


class EmptyError(OpbenchError):
    """An aggregate was requested over an empty event set."""


class FixtureError(OpbenchError):
    """One or more bundled fixtures failed verification."""


class TraceError(OpbenchError):
    """Symbolic tracing failed (dynamic control flow in the model)."""


class UnknownOpWarning(UserWarning):
    """FLOP accounting saw an operator it has no convention for."""
