import pytest

ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Register one acceptance line: (criterion id, passed, detail)."""
    def record(cid, passed, detail=""):
        ACCEPTANCE.append((cid, bool(passed), detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, passed, detail in sorted(ACCEPTANCE, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if passed else 'FAIL'}  {detail}")
