"""Shared pytest plumbing: the acceptance criteria report one line each."""

ACCEPTANCE_LINES = []


def record_criterion(label, passed, detail):
    line = f"criterion {label:<3} {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
