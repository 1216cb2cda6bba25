"""Non-fatal problem records collected while scanning, extracting, and generating."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    """One non-fatal problem, serializable into run reports.

    category is a short machine-readable tag ("unreadable-file",
    "unresolved-route", "duplicate-symbol", ...); path is the file the
    problem concerns, when there is one.
    """

    category: str
    message: str
    path: str = ""

    def to_dict(self) -> dict:
        d = {"category": self.category, "message": self.message}
        if self.path:
            d["path"] = self.path
        return d


@dataclass
class DiagnosticSink:
    """Append-only collector shared down a pipeline run."""

    items: list[Diagnostic] = field(default_factory=list)

    def add(self, category: str, message: str, path: str = "") -> None:
        self.items.append(Diagnostic(category, message, path))

    def extend(self, other: "DiagnosticSink") -> None:
        self.items.extend(other.items)

    def to_list(self) -> list[dict]:
        return [d.to_dict() for d in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)
