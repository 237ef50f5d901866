"""Located messages and the exceptions shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """A parse or lint message.

    ``theme`` is the theme (or story id) the message is about, when there is one.
    ``file`` and ``line`` locate parse diagnostics; ``line`` is 1-based.
    """

    severity: str
    code: str
    message: str
    theme: str | None = None
    file: str | None = None
    line: int | None = None

    def __post_init__(self):
        if self.severity not in (ERROR, WARNING):
            raise ValueError(f"unknown severity {self.severity!r}")

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def sort_key(self):
        return (
            self.code,
            self.theme or "",
            self.file or "",
            self.line or 0,
            self.severity,
            self.message,
        )

    def location(self) -> str:
        if self.file is None:
            return "" if self.line is None else f"line {self.line}"
        return self.file if self.line is None else f"{self.file}:{self.line}"

    def __str__(self):
        loc = self.location()
        prefix = f"{loc}: " if loc else ""
        return f"{prefix}{self.severity} {self.code}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Diagnostic, ...] = field(default_factory=tuple)

    @classmethod
    def from_issues(cls, issues: Iterable[Diagnostic]) -> ValidationReport:
        # dedupe exact repeats, then fix the order
        return cls(tuple(sorted(set(issues), key=Diagnostic.sort_key)))

    @property
    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.issues if d.is_error)

    @property
    def warnings(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.issues if not d.is_error)

    @property
    def error_count(self) -> int:
        return len(self.errors)

    @property
    def warning_count(self) -> int:
        return len(self.warnings)

    @property
    def ok(self) -> bool:
        return self.error_count == 0

    def codes(self) -> list[str]:
        return [d.code for d in self.issues]

    def __str__(self):
        return "\n".join(str(d) for d in self.issues)


class LTOError(Exception):
    """Base class for toolkit errors; ``code`` is a stable identifier."""

    code = "LTO_ERROR"


class UnknownThemeError(LTOError, KeyError):
    code = "UNKNOWN_THEME"

    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown theme {self.name!r}"


class UnknownStoryError(LTOError, KeyError):
    code = "UNKNOWN_STORY"

    def __init__(self, story_id):
        super().__init__(story_id)
        self.story_id = story_id

    def __str__(self):
        return f"unknown story {self.story_id!r}"


class DomainError(LTOError, ValueError):
    code = "DOMAIN"


class AnalysisError(LTOError, ValueError):
    """Invalid story selection for an analysis (empty or overlapping groups)."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class OntologyError(LTOError):
    """Raised when a theme list does not form a valid ontology."""

    code = "INVALID_ONTOLOGY"

    def __init__(self, report: ValidationReport):
        self.report = report
        head = f"{report.error_count} error(s) building ontology"
        first = report.errors[:5]
        super().__init__("\n".join([head, *(str(d) for d in first)]))
