"""Exception hierarchy shared by all engines."""

from __future__ import annotations

from dataclasses import dataclass


class HodefError(Exception):
    """Base class for every error raised by the package."""


@dataclass(frozen=True)
class Issue:
    """A single positioned diagnostic."""

    code: str
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}: " if self.line else ""
        return f"{where}{self.code}: {self.message}"

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message,
                "line": self.line, "column": self.column}


class IssueError(HodefError):
    """An error carrying a list of diagnostics."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("\n".join(str(i) for i in self.issues))


class ParseError(IssueError):
    pass


class TypeCheckError(IssueError):
    pass


class NotDefinitional(IssueError):
    """The program is outside the class an engine accepts."""


class ResourceError(HodefError):
    """A configured cap was exceeded; results would be incomplete."""


class UniverseOverflow(ResourceError):
    pass


class DomainOverflow(ResourceError):
    def __init__(self, rho, estimated_size, message: str = ""):
        self.rho = rho
        self.estimated_size = estimated_size
        super().__init__(message or f"domain of type {rho} exceeds cap (size >= {estimated_size})")


class InfiniteDomain(DomainOverflow):
    """The individual domain is infinite (function symbols present)."""

    def __init__(self, message: str):
        super().__init__("i", float("inf"), message)


class IterationCapExceeded(HodefError):
    pass


class UnboundVariable(HodefError):
    pass


class TypeMismatch(HodefError):
    pass


class GenerationExhausted(HodefError):
    pass
