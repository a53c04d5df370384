"""
exceptions.py
Error hierarchy for the subspaces app.

Every error carries the process exit code the `subspace` management command
reports for it:
    - InvalidInputError: 2, malformed or out-of-domain input.
    - PreconditionError: 3, a stated precondition on a spectrum or contract is violated.
    - InvariantError: 4, an internal consistency check failed.
"""


class SubspaceError(Exception):
    """Base class for all errors raised by the subspaces app."""
    exit_code = 1


class InvalidInputError(SubspaceError):
    exit_code = 2


class PreconditionError(SubspaceError):
    exit_code = 3


class InvariantError(SubspaceError):
    exit_code = 4
