import pytest

from convembed.trainer.pairs import Pair, PairSet, build_pairs
from convembed.utils.errors import SelectionError


def groups(k):
    return [f"low{i}" for i in range(k)], [f"high{i}" for i in range(k)]


@pytest.mark.parametrize("k", [1, 10, 15, 20, 25, 30])
def test_pair_counts(k):
    pairs = build_pairs(*groups(k), seed=0)
    assert pairs.n_positive == k * k - k
    assert pairs.n_negative == k * k
    assert len(pairs) == 2 * k * k - k


def test_k20_totals_780():
    assert len(build_pairs(*groups(20), seed=0)) == 780


def test_labels_follow_groups():
    low, high = groups(4)
    for pair in build_pairs(low, high, seed=1):
        same = (pair.a in low) == (pair.b in low)
        assert pair.y == int(same)
        assert pair.a != pair.b


def test_every_unordered_pair_appears_once():
    pairs = build_pairs(*groups(5), seed=2)
    keys = [frozenset((p.a, p.b)) for p in pairs]
    assert len(keys) == len(set(keys))


def test_order_is_seeded():
    low, high = groups(6)
    assert build_pairs(low, high, seed=3).pairs == build_pairs(low, high, seed=3).pairs
    assert build_pairs(low, high, seed=3).pairs != build_pairs(low, high, seed=4).pairs


def test_overlapping_groups():
    with pytest.raises(SelectionError, match="overlap"):
        build_pairs(["a", "b"], ["b", "c"], seed=0)


@pytest.mark.parametrize("low,high", [([], []), (["a"], ["b", "c"]), (["a", "a"], ["b", "c"])])
def test_malformed_groups(low, high):
    with pytest.raises(SelectionError):
        build_pairs(low, high, seed=0)


def test_pair_set_validation():
    with pytest.raises(SelectionError):
        PairSet([Pair("a", "a", 1)])
    with pytest.raises(SelectionError):
        PairSet([Pair("a", "b", 2)])


def test_batches_cover_everything_in_order():
    pairs = build_pairs(*groups(3), seed=0)
    batches = list(pairs.batches(4))
    assert [len(b) for b in batches] == [4, 4, 4, 3]
    assert [p for b in batches for p in b] == pairs.pairs


def test_conv_ids_in_first_appearance_order():
    pairs = PairSet([Pair("b", "a", 0), Pair("c", "b", 1)])
    assert pairs.conv_ids() == ["b", "a", "c"]
