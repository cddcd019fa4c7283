import pytest

from helpers import corpus_graph


@pytest.fixture(scope="session")
def small_corpus():
    """Sixty mixed-family graphs, ten per family, n <= 50."""
    return [corpus_graph(i) for i in range(60)]
