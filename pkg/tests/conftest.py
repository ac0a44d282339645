import pytest

from mgsat.corpus import published_lexicon, reference_corpus


@pytest.fixture(scope="session")
def corpus():
    return reference_corpus()


@pytest.fixture(scope="session")
def by_name(corpus):
    return {s.name: s for s in corpus}


@pytest.fixture(scope="session")
def lex_c():
    return published_lexicon("c")


@pytest.fixture(scope="session")
def lex_b():
    return published_lexicon("b")


@pytest.fixture(scope="session")
def lex_a():
    return published_lexicon("a")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    RESULTS = getattr(mod, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} ({detail})")
