"""Exception hierarchy shared by the library, CLI, and HTTP service."""


class PickxiError(Exception):
    """Base class; carries a machine-readable error class name."""

    error_class = "internal"
    exit_code = 7


class ParseError(PickxiError):
    """Malformed or non-ODI match file, or a missing mandatory field."""

    error_class = "parse"
    exit_code = 6


class RosterError(PickxiError):
    """Bad roster file: duplicate ids, unknown role string, unparsable row."""

    error_class = "roster"
    exit_code = 6


class SnapshotFormatError(PickxiError):
    """Snapshot container version or layout mismatch."""

    error_class = "snapshot-format"
    exit_code = 6


class SnapshotIntegrityError(PickxiError):
    """Snapshot checksum does not match its payload."""

    error_class = "snapshot-integrity"
    exit_code = 6


class UnknownPlayerError(PickxiError):
    """A player id is not present in the registry."""

    error_class = "unknown-player"
    exit_code = 4


class UnrateableError(PickxiError):
    """Player lacks the sample size or variance needed for a rating."""

    error_class = "unrateable"
    exit_code = 4


class ConstraintError(PickxiError):
    """A team-composition or request constraint is violated.

    ``rule`` names the violated constraint so callers can surface it.
    """

    error_class = "constraint"
    exit_code = 3

    def __init__(self, rule: str, message: str):
        super().__init__(message)
        self.rule = rule


class InfeasibleError(PickxiError):
    """The candidate pool cannot fill the requested composition."""

    error_class = "infeasible"
    exit_code = 5

    def __init__(self, slot: str, message: str):
        super().__init__(message)
        self.slot = slot
