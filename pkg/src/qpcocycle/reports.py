"""Shared result records for identity checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = ["IdentityResidualReport", "rel_residual"]


def rel_residual(a: float, b: float) -> float:
    """|a - b| / max(|a|, |b|, 1e-300) for magnitudes, safe at zero."""
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


@dataclass(frozen=True)
class IdentityResidualReport:
    identity: str
    params: dict
    residual_abs: float
    residual_rel: float
    tolerance: float
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.residual_rel <= self.tolerance and math.isfinite(self.residual_rel)

    def to_record(self) -> dict:
        return {
            "identity": self.identity,
            "params": self.params,
            "residual": self.residual_rel,
            "residual_abs": self.residual_abs,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "flags": list(self.flags),
        }
