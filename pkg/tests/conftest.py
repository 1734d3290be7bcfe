"""Shared fixtures and the per-criterion pass/fail summary."""

from __future__ import annotations

from pathlib import Path

import pytest

from survid.data import path as data_path

GOLDEN = Path(__file__).parent / "golden"

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n = mark.args[0]
            entry = _criteria.setdefault(n, {"title": mark.kwargs.get("title", ""), "failed": [], "ran": 0})
            entry["title"] = entry["title"] or mark.kwargs.get("title", "")
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    n = dict(report.user_properties).get("criterion")
    if n is None:
        return
    entry = _criteria[n]
    if report.when == "call":
        entry["ran"] += 1
    if report.failed:
        entry["failed"].append(report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        entry = _criteria[n]
        if entry["failed"]:
            verdict = "FAIL"
        elif entry["ran"]:
            verdict = "PASS"
        else:
            verdict = "NOT RUN"
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {entry['title']}")


@pytest.fixture
def data():
    """Path to a bundled example file."""
    return data_path


@pytest.fixture
def golden():
    return GOLDEN
