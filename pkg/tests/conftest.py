"""Echo the acceptance verdict lines at the end of the pytest run."""

import test_acceptance


def pytest_terminal_summary(terminalreporter):
    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
