"""Trilean outcomes with attached certificates."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any


class Status(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    UNDETERMINED = "undetermined"
    NOT_APPLICABLE = "not-applicable"

    @property
    def exit_code(self) -> int:
        return {Status.HOLDS: 0, Status.VIOLATED: 1, Status.UNDETERMINED: 2,
                Status.NOT_APPLICABLE: 0}[self]


@dataclass
class Verdict:
    status: Status
    reason: str = ""
    certificate: dict = field(default_factory=dict)
    witness: Any = None
    strict: bool = False

    @classmethod
    def holds(cls, reason="", strict=False, **cert):
        return cls(Status.HOLDS, reason, dict(cert), None, strict)

    @classmethod
    def violated(cls, reason="", witness=None, **cert):
        return cls(Status.VIOLATED, reason, dict(cert), witness, False)

    @classmethod
    def undetermined(cls, reason="", **cert):
        return cls(Status.UNDETERMINED, reason, dict(cert))

    @classmethod
    def not_applicable(cls, reason="", **cert):
        return cls(Status.NOT_APPLICABLE, reason, dict(cert))

    @property
    def is_holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def is_violated(self) -> bool:
        return self.status is Status.VIOLATED

    @property
    def is_undetermined(self) -> bool:
        return self.status is Status.UNDETERMINED

    def __bool__(self):
        return self.status is Status.HOLDS

    def summary(self) -> str:
        s = self.status.value
        if self.status is Status.HOLDS and self.strict:
            s += " (strict)"
        return f"{s}: {self.reason}" if self.reason else s


def combine(verdicts, reason="") -> Verdict:
    """Conjunction: violated dominates undetermined, which dominates holds."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.is_violated:
            return v
    for v in verdicts:
        if v.is_undetermined:
            return v
    strict = all(v.strict for v in verdicts if v.is_holds) if verdicts else False
    return Verdict.holds(reason, strict=strict)


class InternalError(RuntimeError):
    """A step that must not fail by construction did fail."""


class PreconditionError(ValueError):
    """Input does not satisfy the documented precondition."""
