import pytest

_REPORT = {}


class AcceptanceReport:
    def record(self, number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"
        _REPORT[number] = line
        print(line)
        return passed

    def skip(self, number, title, reason):
        _REPORT[number] = f"[SKIP] criterion {number:>2}: {title} -- {reason}"
        pytest.skip(reason)


@pytest.fixture
def acceptance():
    return AcceptanceReport()


def pytest_terminal_summary(terminalreporter):
    if not _REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_REPORT):
        terminalreporter.write_line(_REPORT[number])
