"""Identity verdicts and their serializations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "PASS"
FAIL = "FAIL"


@dataclass
class IdentityReport:
    name: str
    verdict: str
    params: dict = field(default_factory=dict)
    truncation: int | str | None = None
    witness: dict | None = None
    elapsed: float = 0.0

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL):
            raise ValueError(f"verdict must be PASS or FAIL, got {self.verdict!r}")
        if self.verdict == FAIL and not self.witness:
            raise ValueError(f"failing report {self.name!r} carries no witness")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def record(self, timings: bool = False) -> dict[str, Any]:
        rec = {
            "name": self.name,
            "verdict": self.verdict,
            "params": self.params,
            "truncation": self.truncation,
        }
        if self.witness is not None:
            rec["witness"] = self.witness
        if timings:
            rec["wall_time_s"] = round(self.elapsed, 3)
        return rec

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.record(timings), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def to_jsonl(reports: Iterable[IdentityReport], timings: bool = False) -> str:
    """One JSON record per line, sorted by name; byte-stable unless timings are on."""
    return "".join(r.to_json(timings) + "\n" for r in sorted(reports, key=lambda r: r.name))


def summary_table(reports: Iterable[IdentityReport]) -> str:
    rows = sorted(reports, key=lambda r: r.name)
    if not rows:
        return "no identities selected\n"
    width = max(len(r.name) for r in rows)
    lines = []
    for r in rows:
        trunc = "exact" if r.truncation == "exact" else f"N={r.truncation}"
        rng = r.params.get("n")
        rng = f"n={rng}" if rng else ""
        line = f"{r.name:<{width}}  {r.verdict}  {trunc:<8} {rng:<10} {r.elapsed:7.2f}s"
        lines.append(line.rstrip())
        if r.witness:
            lines.append(f"{'':<{width}}    witness: {json.dumps(r.witness, sort_keys=True)}")
    passed = sum(r.passed for r in rows)
    lines.append(f"{passed}/{len(rows)} identities pass")
    return "\n".join(lines) + "\n"
