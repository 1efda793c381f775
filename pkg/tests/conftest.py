"""Suite-wide fixtures and the acceptance-criteria summary section."""

import pytest

ACCEPTANCE_RESULTS = []


@pytest.fixture
def acceptance_report():
    """Collect one pass/fail line per acceptance criterion.

    Lines print immediately (visible under ``-s``) and again in a
    dedicated terminal-summary section after the run.
    """

    def _report(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_RESULTS.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
