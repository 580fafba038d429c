from pathlib import Path

import pytest

from taxomatch import KeywordSelection, Taxonomy, load_taxonomy

FIXTURES = Path(__file__).parent / "fixtures"

SIX_PARENTS = {"root": None, "A": "root", "A1": "A", "A2": "A", "B": "root", "B1": "B"}

# filled by test_acceptance, printed after the run
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def six() -> Taxonomy:
    return load_taxonomy(FIXTURES / "six" / "taxonomy.json")


@pytest.fixture
def sel():
    def make(owner, *items):
        return KeywordSelection.of(owner, items)
    return make


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
