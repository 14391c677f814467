import pytest

_LINES = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the terminal summary, then assert it."""

    def record(label, ok, detail):
        _LINES.append(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
        print(_LINES[-1])
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
