"""Shared fixtures: the acceptance battery runs once per session."""

import time

import pytest

from randsteps.selftest import run_battery


@pytest.fixture(scope="session")
def battery():
    """All fourteen battery rows keyed by criterion label, plus the runtime."""
    start = time.perf_counter()
    rows = run_battery()
    elapsed = time.perf_counter() - start
    by_label = {row.criterion: row for row in rows}
    by_label["_rows"] = rows
    by_label["_elapsed"] = elapsed
    return by_label
