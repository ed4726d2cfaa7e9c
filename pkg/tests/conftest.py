"""Collects one verdict line per acceptance criterion and prints them at the end."""

import pytest

_VERDICTS = []


class Verdicts:
    def record(self, number, passed, detail, flag=None):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} | {detail}"
        if flag:
            line += f" | FLAG: {flag}"
        _VERDICTS.append((number, line))
        print(line)
        return passed


@pytest.fixture(scope="session")
def verdicts():
    return Verdicts()


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_VERDICTS):
        terminalreporter.write_line(line)
