import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from condreg import fixtures  # noqa: E402
from report import ACCEPTANCE  # noqa: E402


@pytest.fixture(scope="session")
def evanston():
    return fixtures.load("evanston")


@pytest.fixture(scope="session")
def evanston_plan(evanston):
    return fixtures.load_plan("evanston", evanston)


@pytest.fixture(scope="session")
def act(evanston):
    """Look up an Evanston action by name."""
    return evanston.domain.action


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}")
