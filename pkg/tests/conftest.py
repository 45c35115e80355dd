import pytest

# acceptance verdicts, filled in by tests/test_acceptance.py
VERDICTS = {}


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(VERDICTS):
        terminalreporter.write_line(VERDICTS[key])


@pytest.fixture
def verdict():
    """Record one line per criterion; the test still asserts on its own."""

    def record(number, ok, detail, status=None):
        status = status or ("PASS" if ok else "FAIL")
        line = f"criterion {number:2d}: {status}  {detail}"
        VERDICTS[number] = line
        print(line)
        return ok

    return record
