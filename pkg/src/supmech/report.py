"""Verification reports shared by every suite."""

from __future__ import annotations

import json
import platform
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .anchors import ANCHORS

SCHEMA_VERSION = "1.0"

EXACT = "exact"


@dataclass
class CheckEntry:
    id: str
    anchor: str
    status: str
    residual: Any
    tolerance: Any
    group: str = ""
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> Dict[str, Any]:
        d = {
            "id": self.id,
            "group": self.group,
            "anchor": self.anchor,
            "status": self.status,
            "residual": _jsonable(self.residual),
            "tolerance": _jsonable(self.tolerance),
        }
        if self.detail:
            d["detail"] = _jsonable(self.detail)
        return d


@dataclass
class VerificationReport:
    suite: str
    entries: List[CheckEntry] = field(default_factory=list)
    results: Dict[str, Any] = field(default_factory=dict)
    started: float = field(default_factory=time.time)
    wall_clock: Optional[float] = None

    def add_exact(self, id: str, anchor_key: str, residual, group: str = "", **detail) -> CheckEntry:
        """Record a symbolic check: passes iff ``residual`` is exactly zero."""
        ok = not residual
        entry = CheckEntry(id, ANCHORS[anchor_key], "pass" if ok else "fail", str(residual) if not ok else "0", EXACT, group, detail)
        self.entries.append(entry)
        return entry

    def add_numeric(self, id: str, anchor_key: str, residual: float, tolerance: float, group: str = "", **detail) -> CheckEntry:
        ok = bool(residual <= tolerance)
        entry = CheckEntry(id, ANCHORS[anchor_key], "pass" if ok else "fail", float(residual), float(tolerance), group, detail)
        self.entries.append(entry)
        return entry

    def add_flag(self, id: str, anchor_key: str, ok: bool, group: str = "", **detail) -> CheckEntry:
        entry = CheckEntry(id, ANCHORS[anchor_key], "pass" if ok else "fail", 0 if ok else 1, 0, group, detail)
        self.entries.append(entry)
        return entry

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.entries.extend(other.entries)
        for k, v in other.results.items():
            self.results[f"{other.suite}.{k}" if k in self.results else k] = v
        return self

    def finish(self) -> "VerificationReport":
        self.wall_clock = time.time() - self.started
        return self

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def failures(self) -> List[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def group(self, name: str) -> List[CheckEntry]:
        return [e for e in self.entries if e.group == name]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "status": self.status,
            "counts": {
                "total": len(self.entries),
                "passed": sum(e.passed for e in self.entries),
                "failed": sum(not e.passed for e in self.entries),
            },
            "entries": [e.to_dict() for e in self.entries],
            "results": _jsonable(self.results),
            "environment": {
                "python": platform.python_version(),
                "platform": platform.system(),
            },
            "timing": {
                "timestamp": self.started,
                "wall_clock_s": self.wall_clock,
            },
        }


def _jsonable(x):
    import numpy as np

    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def emit_report(report: VerificationReport, format: str = "json") -> bytes:
    """Serialise a report as versioned JSON or a fixed-width text table."""
    if format == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if format == "text":
        rows = [(e.id, e.status, _short(e.residual), _short(e.tolerance), e.anchor) for e in report.entries]
        header = ("check", "status", "residual", "tolerance", "anchor")
        widths = [max(len(r[k]) for r in rows + [header]) for k in range(4)]
        lines = [f"suite: {report.suite}   status: {report.status}"]
        fmt = "  ".join(f"{{:<{w}}}" for w in widths) + "  {}"
        lines.append(fmt.format(*header))
        lines.append(fmt.format(*("-" * w for w in widths), "-" * 6))
        lines.extend(fmt.format(*r) for r in rows)
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown report format {format!r}")


def _short(x) -> str:
    if isinstance(x, float):
        return f"{x:.3e}"
    s = str(x)
    return s if len(s) <= 40 else s[:37] + "..."
