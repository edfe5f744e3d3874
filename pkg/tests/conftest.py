from __future__ import annotations

import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_CRITERIA] = {}


@pytest.fixture
def criterion(request):
    """``record(number, title, ok, detail)`` files one acceptance line for the summary."""
    results = request.config.stash[_CRITERIA]

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        results[number] = (title, bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail = results[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
