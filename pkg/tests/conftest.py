"""Shared test plumbing: collect acceptance-criterion verdicts and print one
line per criterion at the end of the run, whether or not stdout capture is on.
"""

_CRITERION_LINES = []


def record_criterion(line: str) -> None:
    _CRITERION_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERION_LINES):
            terminalreporter.write_line(line)
