"""Machine-readable verification reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from . import __version__
from .config import RunConfig

Residual = Union[float, str, None]

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["config", "checks", "version"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "config": {
            "type": "object",
            "required": ["symbolic", "numeric", "quadrature", "tolerances", "conventions"],
        },
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "paper_ref", "status", "residual", "threshold"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "paper_ref": {"type": "string"},
                    "status": {"enum": ["pass", "fail"]},
                    "residual": {"type": ["number", "string", "null"]},
                    "threshold": {"type": ["number", "null"]},
                },
            },
        },
    },
}


@dataclass
class Check:
    id: str
    paper_ref: str
    passed: bool
    residual: Residual = None
    threshold: float | None = None

    @classmethod
    def measured(cls, id: str, ref: str, residual: float, threshold: float) -> "Check":
        ok = bool(residual <= threshold) and not math.isnan(residual)
        return cls(id, ref, ok, float(residual), threshold)

    @classmethod
    def exact(cls, id: str, ref: str, passed: bool, residual: str | None = None) -> "Check":
        return cls(id, ref, passed, "0" if passed and residual is None else residual, None)

    def as_dict(self) -> dict:
        r = self.residual
        if isinstance(r, float) and not math.isfinite(r):
            r = str(r)
        return {
            "id": self.id,
            "paper_ref": self.paper_ref,
            "status": "pass" if self.passed else "fail",
            "residual": r,
            "threshold": self.threshold,
        }


@dataclass
class Report:
    config: RunConfig
    checks: list[Check] = field(default_factory=list)
    version: str = __version__

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def as_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "checks": [c.as_dict() for c in self.checks],
            "version": self.version,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent)

    def write(self, path: str | Path | None) -> str:
        text = self.to_json()
        if path is not None:
            Path(path).write_text(text + "\n")
        return text
