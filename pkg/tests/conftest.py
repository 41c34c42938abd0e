import pytest

from orbit_lvalues.characters import unit_group


@pytest.fixture(scope="session")
def g81():
    return unit_group(3, 4)


@pytest.fixture(scope="session")
def g243():
    return unit_group(3, 5)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
