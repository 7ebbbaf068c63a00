import json
from pathlib import Path

import pytest
from hypothesis import settings

# fixed example generation so property runs are reproducible
settings.register_profile("fixed", derandomize=True, deadline=None, print_blob=True)
settings.load_profile("fixed")

FIXTURES = Path(__file__).parent / "fixtures"
_ACCEPTANCE = []


@pytest.fixture(scope="session")
def seeds():
    return json.loads((FIXTURES / "seeds.json").read_text())


@pytest.fixture(scope="session")
def sector_fixture():
    return json.loads((FIXTURES / "sector_basis.json").read_text())


@pytest.fixture
def report():
    """Record one acceptance line: report(criterion, passed, detail)."""

    def _record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {criterion}: {detail}")
