from __future__ import annotations

import time
from contextlib import contextmanager

import pytest

_RESULTS: dict[int, tuple[str, str, float, str]] = {}


class Criterion:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.notes: list[str] = []

    def note(self, text: str) -> None:
        self.notes.append(text)


@pytest.fixture
def criterion():
    """Context manager recording pass/fail and wall time of one acceptance criterion."""

    @contextmanager
    def run(number: int, title: str):
        c = Criterion(number, title)
        t0 = time.perf_counter()
        try:
            yield c
        except BaseException:
            _RESULTS[number] = ("FAIL", title, time.perf_counter() - t0, "; ".join(c.notes))
            raise
        _RESULTS[number] = ("PASS", title, time.perf_counter() - t0, "; ".join(c.notes))

    return run


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, secs, notes = _RESULTS[number]
        extra = f" ({notes})" if notes else ""
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {title} [{secs:.2f}s]{extra}")
