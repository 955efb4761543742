import pytest

ACCEPTANCE_LINES = {}


@pytest.fixture
def criterion():
    """Record one acceptance line; the test asserts afterwards."""
    def _record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
