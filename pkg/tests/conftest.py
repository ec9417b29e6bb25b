from __future__ import annotations

from pathlib import Path

import pytest

from structsearch.evaluation import build_benchmark
from structsearch.generation import GenConfig, enumerate_queries
from structsearch.mocks import TemplateNlProvider
from structsearch.nl import build_index, drop_overlapping, pair_generated
from structsearch.providers import HashingEmbedder
from structsearch.syntax import Corpus, load_bundled_corpus

TESTS = Path(__file__).parent
DATA = TESTS.parent / "src" / "structsearch" / "data"
GOLDEN = TESTS / "golden"
FIXTURES = TESTS / "fixtures"

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, title = marker.args
    _CRITERIA[n] = (title, "PASS" if call.excinfo is None else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, outcome = _CRITERIA[n]
        terminalreporter.write_line(f"{outcome} criterion {n:>2}: {title}")


@pytest.fixture(scope="session")
def bundled():
    return load_bundled_corpus()


@pytest.fixture(scope="session")
def append_loop_source() -> str:
    return (DATA / "AppendLoop.java").read_text()


@pytest.fixture(scope="session")
def append_loop(append_loop_source) -> Corpus:
    return Corpus.from_sources({"AppendLoop.java": append_loop_source})


@pytest.fixture(scope="session")
def tostring_rule() -> str:
    return (DATA / "tostring_in_loop.yaml").read_text()


@pytest.fixture(scope="session")
def bench20(bundled):
    """Twenty self-generated queries paired with template sentences."""
    return build_benchmark(bundled, GenConfig(n_q=20, seed=11), TemplateNlProvider())


@pytest.fixture(scope="session")
def train_index(bundled, bench20):
    generated = enumerate_queries(bundled, GenConfig(n_q=60, seed=12))
    pairs = drop_overlapping(pair_generated(generated, TemplateNlProvider()), bench20.queries)
    return build_index(pairs, HashingEmbedder())
