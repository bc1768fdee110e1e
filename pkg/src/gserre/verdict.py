"""Structured pass/fail results with witnesses."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    # a hypothesis needed by the criterion does not hold
    NOT_APPLICABLE = "NOT_APPLICABLE"
    # checkable part passed/failed but existence needs a supplied certificate
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Violation:
    """One failed inequality at one point."""

    point: str
    clause: str
    required: int | None = None
    actual: int | None = None
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": self.point,
            "clause": self.clause,
            "required": self.required,
            "actual": self.actual,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check.

    ``clauses`` maps clause ids to their individual outcome; ``violations`` is
    sorted so that ``witness`` is the lexicographically first violating point.
    ``data`` carries check-specific extras that serialize to JSON.
    """

    status: Status
    clauses: dict[str, bool] = field(default_factory=dict)
    violations: tuple[Violation, ...] = ()
    data: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.status is Status.PASS

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    @property
    def witness(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "clauses": dict(sorted(self.clauses.items())),
            "violations": [v.to_dict() for v in self.violations],
            "data": self.data,
        }


def sort_violations(violations) -> tuple[Violation, ...]:
    return tuple(sorted(violations, key=lambda v: (v.point, v.clause)))
