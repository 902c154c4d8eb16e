"""Structured, locator-bearing conversion log."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .tokens import Locator


class Severity(enum.IntEnum):
    INFO = 0
    WARNING = 1
    ERROR = 2
    FATAL = 3

    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class LogEntry:
    severity: Severity
    category: str
    message: str
    locator: Locator | None = None

    def as_dict(self, version: str | None = None) -> dict:
        d: dict = {
            "severity": self.severity.label(),
            "category": self.category,
            "message": self.message,
            "locator": self.locator.as_dict() if self.locator else None,
        }
        if version is not None:
            d["version"] = version
        return d


class Diagnostics:
    """Ordered collector of log entries for one conversion."""

    def __init__(self):
        self.entries: list[LogEntry] = []

    def add(self, severity: Severity, category: str, message: str,
            locator: Locator | None = None) -> LogEntry:
        entry = LogEntry(severity, category, message, locator)
        self.entries.append(entry)
        return entry

    def info(self, category, message, locator=None):
        return self.add(Severity.INFO, category, message, locator)

    def warning(self, category, message, locator=None):
        return self.add(Severity.WARNING, category, message, locator)

    def error(self, category, message, locator=None):
        return self.add(Severity.ERROR, category, message, locator)

    def fatal(self, category, message, locator=None):
        return self.add(Severity.FATAL, category, message, locator)

    @property
    def has_fatal(self) -> bool:
        return any(e.severity is Severity.FATAL for e in self.entries)

    @property
    def has_warnings(self) -> bool:
        return any(e.severity >= Severity.WARNING for e in self.entries)

    def extend(self, other: "Diagnostics") -> None:
        self.entries.extend(other.entries)


def serialize_log(entries: list[LogEntry], version: str) -> str:
    """One JSON object per line; every line carries the build version."""
    return "\n".join(json.dumps(e.as_dict(version), ensure_ascii=False)
                     for e in entries)


def format_log_line(entry: LogEntry) -> str:
    loc = f" at {entry.locator}" if entry.locator else ""
    return f"{entry.severity.label()}[{entry.category}]{loc}: {entry.message}"
