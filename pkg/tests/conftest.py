import pytest

_acceptance = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary."""
    def record(number, title, ok, detail=""):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        _acceptance.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance:
            terminalreporter.write_line(line)
