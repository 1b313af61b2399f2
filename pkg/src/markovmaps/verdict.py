"""Three-valued verdicts with an auditable basis."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

HOLDS, FAILS, UNKNOWN = "holds", "fails", "unknown"
STATUSES = (HOLDS, FAILS, UNKNOWN)


@dataclass(frozen=True)
class Verdict:
    status: str
    basis: str
    witness: Any = None
    caveat: Optional[str] = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad verdict status {self.status!r}")
        if self.status != UNKNOWN and not self.basis:
            raise ValueError("a definite verdict needs a basis")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    def __str__(self):
        return self.status
