import warnings

import pytest

from lconductor import forms as bqf

_REPORT_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_REPORT_KEY] = []


@pytest.fixture
def report(request):
    """Record one acceptance line; printed again in the terminal summary."""
    lines = request.config.stash[_REPORT_KEY]

    def _report(criterion, ok, detail):
        line = f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}"
        lines.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def group():
    cache = {}

    def get(q):
        if q not in cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cache[q] = bqf.class_group(q)
        return cache[q]

    return get
