"""Command reports: named checks with verdicts, echoed inputs and timing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

VERDICTS = ("pass", "fail", "error")


@dataclass
class Check:
    name: str
    verdict: str
    witness: Any = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")

    @classmethod
    def of(cls, name: str, ok: bool, witness: Any = None) -> "Check":
        return cls(name, "pass" if ok else "fail", witness)

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "witness": self.witness}


@dataclass
class Report:
    command: str
    inputs: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    result: Any = None
    text: str | None = None     # human rendering of the result
    elapsed: float = 0.0
    show_checks: bool = True

    def add(self, name: str, ok: bool, witness: Any = None) -> bool:
        self.checks.append(Check.of(name, ok, witness))
        return ok

    def error(self, name: str, message: str) -> None:
        self.checks.append(Check(name, "error", message))

    @property
    def passed(self) -> bool:
        return all(c.verdict == "pass" for c in self.checks)

    def to_json(self) -> dict:
        return {"command": self.command, "inputs": self.inputs,
                "checks": [c.to_json() for c in self.checks], "result": self.result,
                "passed": self.passed, "elapsed": round(self.elapsed, 4)}

    @classmethod
    def from_json(cls, data: dict) -> "Report":
        return cls(data["command"], data.get("inputs", {}),
                   [Check(c["name"], c["verdict"], c.get("witness")) for c in data["checks"]],
                   data.get("result"), elapsed=data.get("elapsed", 0.0))

    def render(self) -> str:
        lines = []
        if self.text is not None:
            lines.append(self.text)
        if self.show_checks or not self.passed:
            for c in self.checks:
                w = "" if c.witness is None else f": {_short(c.witness)}"
                lines.append(f"[{c.verdict}] {c.name}{w}")
        return "\n".join(lines)


def _short(value: Any) -> str:
    return value if isinstance(value, str) else json.dumps(value)
