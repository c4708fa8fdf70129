"""Run a selection of registry identities and collect their reports."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigError
from .identities import registry
from .report import IdentityReport

FORMATS = ("text", "jsonl")


@dataclass(frozen=True)
class SuiteConfig:
    """What to run and how to report it.

    ``order`` and ``n_max`` override every selected entry's own settings
    when given.
    """

    order: Optional[int] = None
    n_max: Optional[int] = None
    identity: Optional[str] = None
    suite: Optional[str] = None
    format: str = "text"
    jobs: int = 1
    timings: bool = False

    def __post_init__(self):
        if self.order is not None and self.order < 1:
            raise ConfigError(f"truncation order must be at least 1, got {self.order}")
        if self.n_max is not None and self.n_max < 0:
            raise ConfigError(f"n_max must be non-negative, got {self.n_max}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown report format {self.format!r}; use one of {', '.join(FORMATS)}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.identity and self.suite:
            raise ConfigError("choose either an identity or a suite, not both")


def _run(args) -> IdentityReport:
    entry, order, n_max, systems = args
    return registry.run_entry(entry, order, n_max, systems)


def run_suite(config: SuiteConfig, entries: Optional[Sequence] = None,
              systems: Optional[dict] = None) -> tuple[list[IdentityReport], int]:
    """Reports sorted by name, and exit status 0 iff every report passes."""
    entries = registry.builtin() if entries is None else list(entries)
    chosen = registry.select(entries, config.identity, config.suite)
    for e in chosen:
        if e.n_range and config.n_max is not None and config.n_max < e.n_range[0]:
            raise ConfigError(f"{e.name}: n_max {config.n_max} is below the range start {e.n_range[0]}")
    work = [(e, config.order, config.n_max, systems) for e in chosen]
    if config.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            reports = list(pool.map(_run, work))
    else:
        reports = [_run(w) for w in work]
    reports.sort(key=lambda r: r.name)
    return reports, 0 if all(r.passed for r in reports) else 1
