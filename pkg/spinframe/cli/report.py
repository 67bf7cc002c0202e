"""
Check Reports

Machine-readable results of the command-line checks. A report is a list of
named checks (max/mean residual against a tolerance) with a provenance block;
its JSON form is deterministic for a fixed input and version.
"""

import json
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from spinframe import __version__
from spinframe.exceptions import SpinframeError
from spinframe.utils.finite_differences import edge_mask

logger = logging.getLogger(__name__)

SCHEMA = "spinframe.report/1"


def _clean(value: Any) -> Any:
    """Convert numpy values to JSON types; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class CheckResult:
    """
    Outcome of one named check.

    Attributes:
        name: Check name
        max_residual: Largest residual (None when the check could not run)
        mean_residual: Mean residual over the evaluated points
        tolerance: Tolerance the residual is compared with
        passed: Whether the check passed
        details: Extra information (edge statistics, error details)
        grid: Optional per-point residuals
    """

    name: str
    max_residual: Optional[float]
    mean_residual: Optional[float]
    tolerance: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    grid: Optional[List[List[Optional[float]]]] = None

    @classmethod
    def from_value(cls, name: str, value: float, tolerance: float,
                   details: Optional[Dict[str, Any]] = None) -> "CheckResult":
        value = float(value)
        return cls(name, value, value, tolerance, bool(value <= tolerance), dict(details or {}))

    @classmethod
    def from_field(cls, name: str, values: np.ndarray, tolerance: float, fd_order: Optional[int] = 4,
                   emit_grid: bool = False) -> "CheckResult":
        """
        Check a residual grid; undefined (NaN) points are skipped.

        With fd_order set, points on one-sided stencils are compared against
        twice the tolerance.
        """
        values = np.asarray(values, dtype=float)
        defined = np.isfinite(values)
        if not np.any(defined):
            return cls(name, None, None, tolerance, False, {"reason": "no defined points"})
        if fd_order is None or values.ndim != 2:
            edges = np.zeros(values.shape, dtype=bool)
        else:
            edges = edge_mask(values.shape, fd_order)
        interior = defined & ~edges
        boundary = defined & edges
        interior_max = float(np.max(values[interior])) if np.any(interior) else 0.0
        boundary_max = float(np.max(values[boundary])) if np.any(boundary) else 0.0
        passed = interior_max <= tolerance and boundary_max <= 2.0 * tolerance
        details = {"interior_max": interior_max, "edge_max": boundary_max}
        undefined = int(np.sum(~defined))
        if undefined:
            details["undefined_points"] = undefined
        return cls(
            name=name,
            max_residual=float(np.max(values[defined])),
            mean_residual=float(np.mean(values[defined])),
            tolerance=tolerance,
            passed=bool(passed),
            details=details,
            grid=values.tolist() if emit_grid else None,
        )

    @classmethod
    def from_error(cls, name: str, error: SpinframeError, tolerance: float = 0.0) -> "CheckResult":
        return cls(name, None, None, tolerance, False, {"error": error.to_dict()})

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "name": self.name,
            "max_residual": self.max_residual,
            "mean_residual": self.mean_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.details:
            result["details"] = self.details
        if self.grid is not None:
            result["grid"] = self.grid
        return _clean(result)


@dataclass
class Report:
    """
    Result of one command.

    Attributes:
        command: Command name
        target: Input file or model description
        checks: Ordered check results
        data: Command-specific summaries
        provenance: Input hash, grid and version
    """

    command: str
    target: str
    checks: List[CheckResult] = field(default_factory=list)
    data: Dict[str, Any] = field(default_factory=dict)
    provenance: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.provenance = dict({"schema": SCHEMA, "version": __version__}, **self.provenance)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def failed_checks(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return _clean({
            "command": self.command,
            "target": self.target,
            "pass": self.passed,
            "checks": [check.to_dict() for check in self.checks],
            "data": self.data,
            "provenance": self.provenance,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def write(self, path: Optional[str] = None) -> None:
        """Write the JSON report to path, or to stdout."""
        text = self.to_json()
        if path is None:
            sys.stdout.write(text)
            return
        with open(path, "w") as f:
            f.write(text)
        logger.info(f"Report written to {path}")
