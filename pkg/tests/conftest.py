import time

import pytest

# (number, title, passed, seconds, limit, detail) for each acceptance criterion run
_CRITERIA: list[tuple] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criteria (slow)")


class Criterion:
    """Times one acceptance criterion and records its verdict for the summary."""

    def __init__(self, number: int, title: str, limit: float | None = None):
        self.number, self.title, self.limit = number, title, limit
        self.start = time.perf_counter()

    def finish(self, ok: bool, detail: str = ""):
        elapsed = time.perf_counter() - self.start
        timely = self.limit is None or elapsed < self.limit
        if ok and not timely:
            detail = f"took {elapsed:.1f}s against a {self.limit:g}s budget"
        _CRITERIA.append((self.number, self.title, ok and timely, elapsed, self.limit, detail))
        assert ok, detail
        assert timely, detail


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, limit, detail in sorted(_CRITERIA):
        budget = f"{elapsed:.2f}s" + (f" < {limit:g}s" if limit else "")
        line = f"{'PASS' if ok else 'FAIL'}  #{number:<2} {title} [{budget}]"
        terminalreporter.write_line(line + (f"\n        {detail}" if detail and not ok else ""))
