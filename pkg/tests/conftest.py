import pytest

from ludilite import RewardConfig, default_corpus, default_grammar


@pytest.fixture(scope="session")
def grammar():
    return default_grammar()


@pytest.fixture(scope="session")
def corpus():
    return default_corpus()


@pytest.fixture(scope="session")
def ttt_text(corpus):
    return next(inst.description for inst in corpus if inst.id == "tic-tac-toe")


@pytest.fixture(scope="session")
def fast_cfg():
    """Reduced playout counts so unit tests stay quick."""
    return RewardConfig().with_overrides({"playouts_gt": 12, "playouts_pred": 6})
