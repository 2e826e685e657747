from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    """Outcome of an exhaustive or sampled check, with witnesses on failure."""

    ok: bool
    violations: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, **self.info}
