import pytest

from markovmaps.fixtures import load_fixture

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def ex71():
    return load_fixture("example-7-1")


@pytest.fixture(scope="session")
def ex72():
    return load_fixture("example-7-2")


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the summary lines."""
    def record(number, title, ok, detail=""):
        ACCEPTANCE[number] = (title, ok, detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
