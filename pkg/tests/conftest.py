"""Shared test plumbing: the acceptance-criterion result banner.

Acceptance tests register one line per criterion through the
`acceptance_report` fixture; the lines are echoed in the terminal
summary so pass/fail status is visible without -s.
"""

_LINES = []


def record_criterion(number, passed, detail):
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:2d}: {status}  {detail}"
    _LINES.append((number, line))
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
