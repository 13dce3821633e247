import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, ok, detail)``."""
    def record(number: int, ok: bool, detail: str) -> None:
        status = "PASS" if ok else "FAIL"
        request.config._acceptance_lines.append(f"[{status}] criterion {number:>2}: {detail}")
        print(f"[{status}] criterion {number}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
