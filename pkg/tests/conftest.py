import pytest

_LINES = []


@pytest.fixture
def criterion(request):
    """Call with (ok, detail); prints and records one PASS/FAIL line for the summary."""

    def report(ok, detail=""):
        name = request.node.name
        line = f"{'PASS' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else "")
        print(line)
        _LINES.append(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
