"""Pass/fail records for checked inequalities."""
from __future__ import annotations

from dataclasses import dataclass

from ._validation import TOL


@dataclass(frozen=True)
class Report:
    """Outcome of checking ``lhs <= rhs``; ``slack = rhs - lhs``."""

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    details: str = ""

    @classmethod
    def check(cls, name: str, lhs: float, rhs: float, tol: float = TOL, details: str = "") -> "Report":
        slack = rhs - lhs
        return cls(name, float(lhs), float(rhs), float(slack), bool(slack >= -tol), details)

    @classmethod
    def equality(cls, name: str, lhs: float, rhs: float, tol: float = TOL, details: str = "") -> "Report":
        """Two-sided check ``|lhs - rhs| <= tol``; slack is ``-|lhs - rhs|``."""
        gap = abs(lhs - rhs)
        return cls(name, float(lhs), float(rhs), -float(gap), bool(gap <= tol), details)

    def format(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status}  {self.name:<40s} lhs={self.lhs:<20.12g} rhs={self.rhs:<20.12g} slack={self.slack:<20.12g}"
        if self.details:
            line += f" {self.details}"
        return line.rstrip()

    def __str__(self):
        return self.format()
