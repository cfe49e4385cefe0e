"""Pass/fail reports emitted by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Report:
    """Outcome of one verification suite.

    `residuals` holds one printable residual per checked index (order or
    particle count); `first_failure` is the first index whose residual was
    not acceptable, or None when the suite passed.
    """

    name: str
    passed: bool
    first_failure: int | None
    residuals: tuple[str, ...]
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "pass": self.passed,
            "first_failure_order": self.first_failure,
            "residuals": list(self.residuals),
        }
        if self.details:
            out["details"] = dict(self.details)
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else f"FAIL (first failure at {self.first_failure})"
        return f"{self.name}: {status}"


def from_residuals(name: str, residuals, is_zero, details=None) -> Report:
    """Build a report from per-index residuals and a zero predicate."""
    first = None
    shown = []
    for idx, r in enumerate(residuals):
        ok = is_zero(r)
        shown.append("0" if ok else str(r))
        if not ok and first is None:
            first = idx
    return Report(
        name=name,
        passed=first is None,
        first_failure=first,
        residuals=tuple(shown),
        details=details or {},
    )


__all__ = ["Report", "from_residuals"]
