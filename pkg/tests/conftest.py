import pytest

_CRITERIA = {}


class CriterionReport:
    """Collects one verdict line per acceptance criterion."""

    def record(self, number: int, passed: bool, detail: str):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed


@pytest.fixture(scope="session")
def criterion():
    return CriterionReport()


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.write_sep("=", "acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
