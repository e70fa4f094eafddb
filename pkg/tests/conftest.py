import pytest


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def criterion_log(request):
    """Collects one verdict line per acceptance criterion for the terminal summary."""
    lines = request.config.acceptance_lines

    def log(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
