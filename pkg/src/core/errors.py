# src/core/errors.py
"""Exception hierarchy. Each class carries the process exit code the CLI uses."""


class StemrankError(Exception):
    exit_code = 1


class UsageError(StemrankError):
    exit_code = 2


class CapExceeded(StemrankError):
    """A configured bound refused the computation."""
    exit_code = 3


class InternalInconsistency(StemrankError):
    """A self-check on exact data failed; the inputs were not what they claimed."""
    exit_code = 1


class NotRational(InternalInconsistency):
    pass
