from __future__ import annotations

import pytest

from strongimpl.fixtures import load_bundled
from strongimpl.instance import conditional_beliefs

# acceptance criteria append (number, passed, detail) here; printed at the end
ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def fixture_a():
    return load_bundled("fixtureA")


@pytest.fixture
def fixture_b():
    return load_bundled("fixtureB")


@pytest.fixture
def fixture_c():
    return load_bundled("fixtureC")


@pytest.fixture
def fixture_d():
    return load_bundled("fixtureD")


def beliefs_of(inst):
    return conditional_beliefs(inst)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
