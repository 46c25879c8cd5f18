"""Error hierarchy shared across the package.

Every error that can surface through the CLI derives from :class:`PolyDeclareError`
so the entry point can map it to exit code 2 uniformly.
"""

from __future__ import annotations


class PolyDeclareError(Exception):
    """Base class for all validation / input errors raised by this package."""


class DatasetError(PolyDeclareError):
    """Malformed dataset files.  Carries a human-readable location."""

    def __init__(self, message: str, *, line: int | None = None, source: str | None = None):
        loc = ""
        if source is not None:
            loc += f"{source}"
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.line = line
        self.source = source


class SchemaError(PolyDeclareError):
    """Structured-artifact (JSON) violations.  Carries a JSON-ish path."""

    def __init__(self, message: str, *, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class ConfigError(PolyDeclareError):
    """Invalid pipeline configuration or CLI arguments."""
