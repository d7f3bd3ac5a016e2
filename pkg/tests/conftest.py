from pathlib import Path

import pytest

from reqlint.catalog import load_catalog
from reqlint.checkers import Resources

DATA = Path(__file__).resolve().parents[1] / "src" / "reqlint" / "data"
CATALOGS = DATA / "catalogs"
CORPORA = DATA / "corpora"


@pytest.fixture(scope="session")
def reference_catalog():
    return load_catalog(CATALOGS / "reference_catalog.json")


@pytest.fixture(scope="session")
def example_catalog():
    return load_catalog(CATALOGS / "example_rules.json")


@pytest.fixture(scope="session")
def doc_resources():
    return Resources.load(CORPORA / "doc_list.tsv")


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
