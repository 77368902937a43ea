import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion_line():
    """Record a one-line PASS/FAIL verdict for the acceptance summary."""

    def record(label: str, passed: bool, detail: str) -> bool:
        _LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
