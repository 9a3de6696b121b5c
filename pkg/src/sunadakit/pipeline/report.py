"""Run reports: ordered stages, expected-value checks and notices.

The JSON form is deterministic (no timings, no paths outside the bundle),
so two runs on the same bundle give byte-identical output.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

SCHEMA_VERSION = 1


def _plain(x: Any) -> Any:
    """Tuples to lists, recursively, so JSON round-trips compare equal."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class Stage:
    name: str
    inputs: dict
    results: dict = field(default_factory=dict)


@dataclass
class Check:
    stage: str
    name: str
    expected: Any
    actual: Any
    passed: bool
    source: str  # fixture file and key the expected value came from

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        out = f"{mark} [{self.stage}] {self.name}: actual={json.dumps(self.actual)}"
        if not self.passed:
            out += f" expected={json.dumps(self.expected)} ({self.source})"
        return out


@dataclass
class RunReport:
    subject: str
    method: str
    stages: list[Stage] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    notices: list[str] = field(default_factory=list)

    def stage(self, name: str, **inputs) -> Stage:
        s = Stage(name, _plain(inputs))
        self.stages.append(s)
        return s

    def get_stage(self, name: str) -> Stage:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def check(self, stage: str, name: str, expected: Any, actual: Any, source: str, passed: bool | None = None) -> Check:
        expected, actual = _plain(expected), _plain(actual)
        if passed is None:
            passed = expected == actual
        c = Check(stage, name, expected, actual, bool(passed), source)
        self.checks.append(c)
        return c

    def notice(self, text: str) -> None:
        self.notices.append(text)

    def merge(self, other: RunReport, prefix: str = "") -> None:
        for s in other.stages:
            self.stages.append(Stage(prefix + s.name, s.inputs, s.results))
        for c in other.checks:
            self.checks.append(Check(prefix + c.stage, c.name, c.expected, c.actual, c.passed, c.source))
        self.notices += [prefix + n for n in other.notices]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "subject": self.subject,
            "method": self.method,
            "stages": [_plain(asdict(s)) for s in self.stages],
            "checks": [asdict(c) for c in self.checks],
            "notices": list(self.notices),
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> RunReport:
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema_version')}")
        return cls(
            data["subject"],
            data["method"],
            [Stage(**s) for s in data["stages"]],
            [Check(**c) for c in data["checks"]],
            list(data["notices"]),
        )

    def render_text(self) -> str:
        lines = [f"{self.method} on {self.subject}"]
        for s in self.stages:
            args = ", ".join(f"{k}={json.dumps(v)}" for k, v in s.inputs.items())
            lines.append(f"== {s.name}" + (f" ({args})" if args else ""))
            for k, v in s.results.items():
                lines.append(f"  {k}: {json.dumps(v)}")
        for n in self.notices:
            lines.append(f"NOTICE {n}")
        for c in self.checks:
            lines.append(c.line())
        total = len(self.checks)
        bad = len(self.failures())
        lines.append(f"{total - bad}/{total} checks passed")
        return "\n".join(lines) + "\n"
