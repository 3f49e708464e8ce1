"""Exception hierarchy shared across the package.

Everything that counts as a domain error (bad input text, failed static
checks, runtime evaluation problems, degenerate statistics) derives from
OdlError so the CLI can map it to one exit status.
"""

from __future__ import annotations


class OdlError(Exception):
    """Base class for all domain errors raised by this package."""


class TraceError(OdlError):
    """Malformed trace file or trace invariant violation."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(OdlError):
    """Lexical or syntactic error in oracle-definition source."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class CheckError(OdlError):
    """Name-resolution or kind error found by the static checker."""


class EvalError(OdlError):
    """Runtime expression-evaluation failure (e.g. division by zero)."""


class EngineError(OdlError):
    """Scoring-engine misuse: timestamp regression or schema mismatch."""


class AnalysisError(OdlError):
    """Degenerate or inconsistent input to ranking/correlation."""


class ScenarioError(OdlError):
    """Invalid scenario specification for the trace generator."""


class CatalogError(OdlError):
    """Unknown bundled-oracle name."""
