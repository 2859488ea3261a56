import pytest

# one line per acceptance criterion, filled in by test_acceptance.py
CRITERIA_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    def record(number: int, title: str, passed: bool, detail: str = ""):
        status = "PASS" if passed else "FAIL"
        CRITERIA_LINES[number] = f"criterion {number:>2} {status}  {title}" + (
            f"  [{detail}]" if detail else "")
        print(CRITERIA_LINES[number])
        assert passed, CRITERIA_LINES[number]
    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(CRITERIA_LINES):
            terminalreporter.write_line(CRITERIA_LINES[number])
