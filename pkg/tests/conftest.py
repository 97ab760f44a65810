import pytest

from holim.corpus import check_corpus, load_manifest


@pytest.fixture(scope="session")
def manifest():
    return load_manifest()


@pytest.fixture(scope="session")
def corpus_report(manifest):
    """One full corpus check shared by every test that needs checked globals."""
    return check_corpus(manifest)


@pytest.fixture(scope="session")
def corpus_env(corpus_report):
    assert corpus_report.ok, [d.render() for d in corpus_report.diagnostics]
    return corpus_report.env
