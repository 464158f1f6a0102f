"""
Report types for planar-beltrami.

This module defines the records written to manifests and verification
reports. Each converts to and from plain dictionaries so it can be stored
as JSON.
"""

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class ElementSummary:
    """One basis element as listed in a basis manifest."""

    name: str
    index: int
    n: int
    flavor: str
    csv: Optional[str] = None
    residuals: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ElementSummary":
        """Create an ElementSummary from a dictionary."""
        return cls(
            name=data["name"],
            index=int(data["index"]),
            n=int(data["n"]),
            flavor=data["flavor"],
            csv=data.get("csv"),
            residuals={k: float(v) for k, v in data.get("residuals", {}).items()},
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert the ElementSummary to a dictionary."""
        return {
            "name": self.name,
            "index": self.index,
            "n": self.n,
            "flavor": self.flavor,
            "csv": self.csv,
            "residuals": dict(self.residuals),
        }

    @property
    def worst_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


@dataclass
class CheckResult:
    """Outcome of one verification check against its threshold."""

    name: str
    value: float
    threshold: float
    element: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(self.value < self.threshold)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CheckResult":
        return cls(
            name=data["name"],
            value=float(data["value"]),
            threshold=float(data["threshold"]),
            element=data.get("element"),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "element": self.element,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
        }


@dataclass
class ResidualReport:
    """All checks of one verification run."""

    checks: list[CheckResult] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, value: float, threshold: float, element: Optional[str] = None) -> None:
        self.checks.append(CheckResult(name, float(value), float(threshold), element))

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def first_failure(self) -> Optional[CheckResult]:
        return next((check for check in self.checks if not check.passed), None)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ResidualReport":
        return cls(
            checks=[CheckResult.from_dict(c) for c in data.get("checks", [])],
            notes=dict(data.get("notes", {})),
        )

    def to_dict(self) -> dict[str, Any]:
        failure = self.first_failure
        return {
            "passed": self.passed,
            "first_failure": None if failure is None else failure.to_dict(),
            "checks": [check.to_dict() for check in self.checks],
            "notes": dict(self.notes),
        }


@dataclass
class FitDiagnostics:
    """Quality of a least-squares collocation fit."""

    residual_norm: float
    relative_residual: float
    max_misfit: float
    condition: float
    rank: int
    n_points: int
    n_terms: int
    regularization: float = 0.0

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FitDiagnostics":
        return cls(
            residual_norm=float(data["residual_norm"]),
            relative_residual=float(data["relative_residual"]),
            max_misfit=float(data["max_misfit"]),
            condition=float(data["condition"]),
            rank=int(data["rank"]),
            n_points=int(data["n_points"]),
            n_terms=int(data["n_terms"]),
            regularization=float(data.get("regularization", 0.0)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "residual_norm": self.residual_norm,
            "relative_residual": self.relative_residual,
            "max_misfit": self.max_misfit,
            "condition": self.condition,
            "rank": self.rank,
            "n_points": self.n_points,
            "n_terms": self.n_terms,
            "regularization": self.regularization,
        }
