import pytest

from cmlid import Corpus, load_sample_corpus
from cmlid.evaluation import ModelSpec, train_backend

_acceptance = []


@pytest.fixture(scope="session")
def sample_corpus():
    return load_sample_corpus()


@pytest.fixture(scope="session")
def small_corpus(sample_corpus):
    return Corpus(list(sample_corpus)[:60])


SMALL_PARAMS = {
    "nb": {},
    "rf": {"n_trees": 8, "seed": 3},
    "hmm": {},
    "crf": {"max_iters": 40},
}


@pytest.fixture(scope="session")
def small_taggers(small_corpus):
    """One quickly trained tagger per backend, shared across test modules."""
    return {kind: train_backend(ModelSpec(kind, params), small_corpus) for kind, params in SMALL_PARAMS.items()}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by a test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    n, title = marker.args
    _acceptance.append((n, title, "PASS" if call.excinfo is None else "FAIL", item.name))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    summary = {}
    for n, title, outcome, _ in _acceptance:
        previous = summary.get(n, (title, "PASS"))[1]
        summary[n] = (title, "FAIL" if "FAIL" in (previous, outcome) else "PASS")
    for n in sorted(summary):
        title, outcome = summary[n]
        terminalreporter.write_line(f"[{outcome}] criterion {n:>2}: {title}")
