"""Shared exception types."""


class ValidationError(ValueError):
    """Input violates a documented invariant or schema."""


class FramingError(ValueError):
    """Wire-protocol packet is malformed; carries the byte offset."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class IntegrityError(ValueError):
    """Stored data failed CRC/hash verification or is truncated."""


class ArchMismatchError(ValueError):
    """Weight file does not match the target architecture."""


class DivergedError(RuntimeError):
    """Training produced a non-finite loss; carries the epoch index."""

    def __init__(self, message, epoch):
        super().__init__(message)
        self.epoch = epoch


class MissingStreamError(ValueError):
    """A required sensor stream is absent from the recording."""


class EmptyRangeError(ValueError):
    """Stream time ranges do not overlap; nothing to align."""


class GraphError(ValueError):
    """Pipeline graph specification is invalid."""


class NodeFailure(RuntimeError):
    """A pipeline node raised; carries node id and last timestamp."""

    def __init__(self, node_id, t_us, cause):
        super().__init__(f"node '{node_id}' failed at t={t_us} us: {cause!r}")
        self.node_id = node_id
        self.t_us = t_us
        self.cause = cause
