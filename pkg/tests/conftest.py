import pytest

from grayscale.corpus import parse_corpus
from grayscale.embeddings import load_embeddings
from grayscale.inventory import load_inventory
from grayscale.resources import bundled_path

TOY_CONFIG = "configs/toy.cfg"


@pytest.fixture(scope="session")
def toy_inventory():
    return load_inventory(bundled_path("toy_inventory.json"))


@pytest.fixture(scope="session")
def toy_table():
    return load_embeddings(bundled_path("toy_embeddings.txt"))


@pytest.fixture(scope="session")
def toy_splits(toy_inventory):
    return {s: parse_corpus(bundled_path(f"toy_{s}.jsonl"), toy_inventory) for s in ("train", "dev", "test")}


@pytest.fixture
def jsonl(tmp_path):
    """Write records to a JSONL file and return its path."""
    import json

    def write(records, name="corpus.jsonl"):
        path = tmp_path / name
        path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
        return path

    return write


ACCEPTANCE_RESULTS = {}


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE_RESULTS[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in sorted(ACCEPTANCE_RESULTS.items()):
        terminalreporter.write_line(f"{status}  {name}")
