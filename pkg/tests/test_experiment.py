from convembed.cli.experiment import sweep_test_margin
from convembed.corpus.selection import SelectionSpec, select_extremes

from tests.conftest import make_corpus


def test_sweep_margin_covers_the_largest_point():
    assert sweep_test_margin(78, [10, 15, 20, 25, 30], [0]) == 30
    assert sweep_test_margin(78, [10, 20], [0, 5]) == 25


def test_full_corpus_keeps_its_middle_block():
    assert sweep_test_margin(156, [10, 15, 20, 25, 30], [0]) == 30


def test_every_sweep_point_shares_one_test_block():
    corpus = make_corpus(range(78), n_turns=3)
    ks = [10, 15, 20, 25, 30]
    margin = sweep_test_margin(len(corpus), ks, [0])
    blocks = {tuple(select_extremes(corpus, SelectionSpec(k=k, test_margin=margin)).test) for k in ks}
    assert len(blocks) == 1
    assert len(next(iter(blocks))) == 18
