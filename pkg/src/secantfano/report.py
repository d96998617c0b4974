"""Check records and their tree-shaped serialisation.

Every verification returns :class:`Check` objects grouped in a :class:`Report`.
``Report.to_tree()`` produces nested dicts/lists of plain strings and booleans;
``dumps`` renders that tree as indented JSON with a fixed key order, so the
same computation always yields byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .scalar import format_scalar


def render(value: Any) -> Any:
    """Recursively turn scalars and records into JSON-ready values."""
    if isinstance(value, (Check, Report)):
        return value.to_tree()
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, str):
        return value
    return format_scalar(value)


@dataclass
class Check:
    name: str
    passed: bool
    citation: str = ""
    detail: dict = field(default_factory=dict)

    def to_tree(self) -> dict:
        tree = {"check": self.name, "passed": self.passed}
        if self.citation:
            tree["citation"] = self.citation
        if self.detail:
            tree["detail"] = render(self.detail)
        return tree

    def __bool__(self):
        return self.passed


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_tree(self) -> dict:
        tree = {"report": self.title, "passed": self.passed}
        if self.data:
            tree["data"] = render(self.data)
        tree["checks"] = [c.to_tree() for c in self.checks]
        if self.notes:
            tree["notes"] = list(self.notes)
        return tree

    def __bool__(self):
        return self.passed


def dumps(tree: Any) -> str:
    return json.dumps(render(tree), indent=2, ensure_ascii=False) + "\n"
