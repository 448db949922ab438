"""Exception types shared across the package.

Contract-level misuse of in-process APIs raises plain ValueError.  The
classes below cover the two failure modes that need to be distinguished
at the command line: unreadable/ill-formed inputs and resource limits.
"""


class DataError(Exception):
    """A file or dataset is malformed (bad token, wrong arity, broken schema)."""


class CapacityError(Exception):
    """An operation exceeds a built-in resource limit (cell count, recursion, acceptance rate)."""
