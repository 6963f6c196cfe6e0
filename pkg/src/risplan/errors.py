"""Exception types shared across the package.

Every error carries a stable ``code`` string so the CLI and the HTTP
service can report machine-readable diagnostics.
"""
from __future__ import annotations


class RisPlanError(Exception):
    code = "ERROR"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


class SceneSyntaxError(RisPlanError):
    """The scene document is not well-formed JSON."""

    code = "SYNTAX"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class SceneSchemaError(RisPlanError):
    """The scene document violates the file schema (bad type, unknown or
    missing key).  ``path`` points at the offending field."""

    code = "SCHEMA"

    def __init__(self, message: str, path: str):
        super().__init__(message, path=path)
        self.path = path


class SceneInvariantError(RisPlanError):
    """A parsed scene violates a named type invariant."""

    code = "INVARIANT"

    def __init__(self, message: str, issues=()):
        super().__init__(message)
        self.issues = list(issues)


class DegenerateEndpointsError(RisPlanError):
    code = "DEGENERATE_ENDPOINTS"


class RisAbsentError(RisPlanError):
    code = "RIS_ABSENT"


class GridMismatchError(RisPlanError):
    code = "GRID_MISMATCH"


class DimensionMismatchError(RisPlanError):
    code = "DIMENSION_MISMATCH"
