import os
import sys
import time

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


# -- acceptance summary -------------------------------------------------------------

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")
    config.stash[_ACCEPTANCE] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.stash[_CALL_OUTCOME] = rep.outcome


_CALL_OUTCOME = pytest.StashKey[str]()


@pytest.fixture
def criterion(request):
    """Times the test and records a PASS/FAIL line for the terminal summary."""
    mark = request.node.get_closest_marker("criterion")
    info = {}
    start = time.perf_counter()
    yield info
    elapsed = time.perf_counter() - start
    ok = request.node.stash.get(_CALL_OUTCOME, "failed") == "passed"
    n, title = mark.args
    detail = f" ({info['detail']})" if "detail" in info else ""
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}{detail} [{elapsed:.2f} s]"
    request.config.stash[_ACCEPTANCE].append((n, line))


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
