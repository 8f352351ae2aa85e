"""Validation reports shared by every checker in the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Issue:
    code: str
    subject: str
    detail: str
    severity: str = ERROR

    def __str__(self) -> str:
        return f"{self.code} {self.subject}: {self.detail}"


@dataclass
class Report:
    """An ordered collection of :class:`Issue` entries.

    A report is *ok* when it holds no error-severity entries; warnings
    never block a commit.
    """

    issues: list[Issue] = field(default_factory=list)

    def add(self, code: str, subject: str, detail: str, severity: str = ERROR) -> None:
        self.issues.append(Issue(code, subject, detail, severity))

    def warn(self, code: str, subject: str, detail: str) -> None:
        self.add(code, subject, detail, WARNING)

    def extend(self, other: Iterable[Issue]) -> None:
        self.issues.extend(other)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def sorted(self) -> list[Issue]:
        return sorted(self.issues, key=lambda i: (i.code, i.subject, i.detail))

    def __iter__(self) -> Iterator[Issue]:
        return iter(self.issues)

    def __len__(self) -> int:
        return len(self.issues)
