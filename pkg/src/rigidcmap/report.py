"""Verification records and their JSON Lines encoding."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


def to_jsonable(x):
    """Recursively convert numpy/complex values; floats keep 15 significant digits."""
    if isinstance(x, dict):
        return {k: to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [to_jsonable(x.real), to_jsonable(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return str(x)
        return float(f"{x:.15g}") + 0.0  # +0.0 folds -0.0
    return x


def dumps(record) -> str:
    return json.dumps(to_jsonable(record), sort_keys=True)


@dataclass
class CheckRecord:
    check: str
    point: int
    residual: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def as_dict(self) -> dict:
        out = {
            "check": self.check,
            "point": self.point,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        out.update(self.detail)
        return out


@dataclass
class VerificationReport:
    records: list = field(default_factory=list)

    def extend(self, records) -> None:
        self.records.extend(records)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def summary(self) -> dict:
        worst = {}
        for r in self.records:
            worst[r.check] = max(worst.get(r.check, 0.0), r.residual)
        return {
            "summary": True,
            "total": len(self.records),
            "passed": sum(r.passed for r in self.records),
            "max_residual": worst,
        }

    def lines(self) -> list:
        return [dumps(r.as_dict()) for r in self.records] + [dumps(self.summary())]
