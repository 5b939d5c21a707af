"""Diagnostics and the exception hierarchy shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.begin > self.end:
            raise ValueError("span begin must not exceed end")

    def to_json(self) -> dict:
        return {"begin": self.begin, "end": self.end, "line": self.line, "column": self.column}


@dataclass(frozen=True)
class Diagnostic:
    """One failure report.

    ``code`` is a stable short identifier such as ``DuplicateIdent``; ``path``
    is the stack of rule names leading to the failure, outermost first.
    """

    code: str
    message: str
    path: tuple[str, ...] = ()
    subterm: Any = None
    span: SourceSpan | None = None
    decl: Any = None  # identifier of the signature entry being checked, if any

    def with_span(self, span: SourceSpan | None) -> Diagnostic:
        return replace(self, span=span)

    def within(self, rule: str) -> Diagnostic:
        return replace(self, path=(rule,) + self.path)

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "path": list(self.path),
            "span": None if self.span is None else self.span.to_json(),
        }

    def __str__(self) -> str:
        where = ""
        if self.span is not None:
            where = f"{self.span.line}:{self.span.column}: "
        return f"{where}{self.code}: {self.message}"


class LFError(Exception):
    """Base class; every instance carries exactly one :class:`Diagnostic`."""

    code = "Error"

    def __init__(self, message: str, *, path=(), subterm=None, span=None, code: str | None = None):
        super().__init__(message)
        self.diagnostic = Diagnostic(code or self.code, message, tuple(path), subterm, span)

    @classmethod
    def from_diagnostic(cls, diagnostic: Diagnostic) -> LFError:
        err = cls(diagnostic.message)
        err.diagnostic = diagnostic
        return err

    def __str__(self) -> str:
        return str(self.diagnostic)


class CheckError(LFError):
    """A typing, kinding or validity judgment failed."""

    code = "IllTyped"


class LooseIndexError(LFError, ValueError):
    code = "LooseIndex"


class ParseError(LFError):
    code = "SyntaxError"


class FuelExhausted(LFError):
    """The step budget ran out; never a verdict about the inputs."""

    code = "OutOfFuel"

    def __init__(self, message: str = "step budget exhausted", *, term=None, path=()):
        super().__init__(message, path=path, subterm=term)
        self.term = term


@dataclass
class Fuel:
    """A step budget shared by every reduction inside one query."""

    limit: int
    used: int = field(default=0)

    def consume(self, term=None) -> None:
        if self.used >= self.limit:
            raise FuelExhausted(f"step budget of {self.limit} exhausted", term=term)
        self.used += 1

    @property
    def remaining(self) -> int:
        return self.limit - self.used


FUEL_DEFAULT = 100_000


def as_fuel(fuel: int | Fuel | None) -> Fuel:
    if fuel is None:
        return Fuel(FUEL_DEFAULT)
    if isinstance(fuel, Fuel):
        return fuel
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    return Fuel(fuel)
