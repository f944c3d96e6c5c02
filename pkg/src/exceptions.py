"""
Exception hierarchy shared by the cascade toolkit.
"""

from typing import Optional, Sequence


class CascadeError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(CascadeError):
    """Invalid run configuration, located as precisely as possible."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, path: Sequence = ()):
        self.line = line
        self.column = column
        self.path = tuple(path)
        location = ""
        if line is not None:
            location = f"line {line}"
            if column is not None:
                location += f", column {column}"
        if self.path:
            field = ".".join(str(part) for part in self.path)
            location = f"{location} ({field})" if location else field
        super().__init__(f"{location}: {message}" if location else message)


class UnsupportedModelError(CascadeError):
    """Operation not defined for this cascade family."""


class UnsupportedCombinationError(CascadeError):
    """Reference measure and cascade family cannot be combined."""


class InfiniteMomentError(CascadeError):
    """E|W|^p diverges for the requested order."""

    def __init__(self, law_kind: str, p: float):
        self.law_kind = law_kind
        self.p = p
        super().__init__(f"infinite moment: E|W|^{p} diverges for law '{law_kind}'")


class ExtensionDomainError(CascadeError):
    """Point outside the domain of the extended Levy exponent."""


class CoverageError(CascadeError):
    """A realization does not cover the requested level or location."""


class InsufficientDataError(CascadeError):
    """Too few grid points or generations for the requested estimate."""
