"""Exception types shared across the package."""

from __future__ import annotations


class StarfixError(Exception):
    """Base class for errors raised by this package."""


class EnumerationBoundError(StarfixError):
    """An exhaustive scan would exceed the configured size bound."""

    def __init__(self, required: int, bound: int, what: str = "enumeration"):
        self.required = required
        self.bound = bound
        super().__init__(f"{what} needs {required} evaluations, bound is {bound}")


class MissingInverseError(StarfixError):
    """Iteration needs g applied backwards but no inverse was supplied."""


class ConfigError(StarfixError):
    """A problem configuration file is malformed or inconsistent."""
