"""Source locations, diagnostics, and the toolkit's error types."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Provenance:
    """A source span: file, 1-based line and column, and length in characters."""

    file: str
    line: int
    column: int
    length: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"degenerate span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


#: Span used for nodes the toolkit manufactures itself (builtin model
#: definitions, trivial programs built in tests).
SYNTHETIC = Provenance(file="<builtin>", line=1, column=1, length=1)


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal finding attached to a source span."""

    message: str
    where: Provenance

    def __str__(self) -> str:
        return f"{self.where}: {self.message}"


class ToolError(Exception):
    """Base class for errors that carry a source span."""

    def __init__(self, message: str, where: Provenance = SYNTHETIC):
        super().__init__(message)
        self.where = where

    def __str__(self) -> str:
        return f"{self.where}: {self.args[0]}"


class UnsupportedConstruct(ToolError):
    """Valid host syntax outside the supported subset, or IR with no transfer.

    Carries every offending span when the front end finds several.
    """

    def __init__(self, message: str, where: Provenance = SYNTHETIC,
                 diagnostics: list[Diagnostic] | None = None):
        super().__init__(message, where)
        self.diagnostics = diagnostics or [Diagnostic(message, where)]


class UnsupportedConstraint(ToolError):
    """A constraint shape the inference engine refuses to approximate."""


class EmptyLanguage(ToolError):
    """Raised when sentence generation is asked to sample an empty language."""


class IRSyntaxError(SyntaxError):
    """Malformed IR concrete syntax (.pir)."""


class EbnfSyntaxError(SyntaxError):
    """Malformed EBNF grammar text."""
