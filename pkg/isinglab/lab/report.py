"""Pass/fail records for inequality and identity checks."""

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np


def array_digest(arr: np.ndarray) -> str:
    """sha256 of the little-endian float64 bytes of ``arr``."""
    data = np.ascontiguousarray(np.asarray(arr, dtype="<f8"))
    return hashlib.sha256(data.tobytes()).hexdigest()


def inputs_digest(inputs: Dict[str, Any]) -> str:
    raw = json.dumps(inputs, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(raw.encode()).hexdigest()


@dataclass(frozen=True)
class InequalityReport:
    """One checked inequality ``lhs ≤ rhs`` or identity ``lhs = rhs``.

    ``passed`` is computed from the values: an inequality passes when
    ``lhs ≤ rhs + tolerance``, an identity when ``|lhs − rhs| ≤ tolerance``,
    with ``tolerance = atol + rtol·|rhs|``.
    """

    inequality: str
    lhs: float
    rhs: float
    kind: str = "inequality"
    atol: float = 0.0
    rtol: float = 0.0
    inputs: str = ""
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def tolerance(self) -> float:
        return self.atol + self.rtol * abs(self.rhs)

    @property
    def margin(self) -> float:
        if self.kind == "identity":
            return self.tolerance - abs(self.lhs - self.rhs)
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if not (np.isfinite(self.lhs) and np.isfinite(self.rhs)):
            return False
        if self.kind == "identity":
            return abs(self.lhs - self.rhs) <= self.tolerance
        return self.lhs <= self.rhs + self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["margin"] = self.margin
        payload["passed"] = self.passed
        return payload


def make_report(
    inequality: str,
    lhs: float,
    rhs: float,
    kind: str = "inequality",
    atol: float = 0.0,
    rtol: float = 0.0,
    inputs: Optional[Dict[str, Any]] = None,
    **details: Any,
) -> InequalityReport:
    return InequalityReport(
        inequality=inequality,
        lhs=float(lhs),
        rhs=float(rhs),
        kind=kind,
        atol=atol,
        rtol=rtol,
        inputs=inputs_digest(inputs or {}),
        details=details,
    )
