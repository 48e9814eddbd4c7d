import numpy as np
import pytest

from convembed.corpus.models import Conversation, Corpus
from convembed.corpus.normalize import NormalizationMode, normalize_per_speaker
from convembed.corpus.synthetic import generate_synthetic

from tests.conftest import make_conversation, small_synth_spec


def conversation(conv_id, speakers, rows, score=1.0):
    return Conversation(conv_id=conv_id, dyad_id="d", score=score, speakers=tuple(speakers), features=rows)


def test_two_values_map_to_plus_minus_one():
    corpus = Corpus([conversation("a", ["A", "B", "A", "B"], [[0.0], [5.0], [2.0], [5.0]])])
    out = normalize_per_speaker(corpus)
    assert out[0].features[:, 0].tolist() == [-1.0, 0.0, 1.0, 0.0]


def test_constant_dimension_maps_to_zero():
    rows = [[3.0, 1.0], [3.0, 2.0], [3.0, 4.0], [3.0, 8.0]]
    out = normalize_per_speaker(Corpus([conversation("a", ["A", "B", "A", "B"], rows)]))
    assert np.all(out[0].features[:, 0] == 0.0)
    assert np.all(np.isfinite(out[0].features))


def test_single_turn_speaker_becomes_zero():
    rows = [[1.0, 2.0], [4.0, 6.0], [0.0, 3.0]]
    out = normalize_per_speaker(Corpus([conversation("a", ["A", "B", "A"], rows)]))
    assert np.all(out[0].features[1] == 0.0)


def test_speaker_pools_have_zero_mean_unit_variance():
    corpus = normalize_per_speaker(generate_synthetic(small_synth_spec()))
    speakers = {s for conv in corpus for s in conv.speakers}
    for speaker in speakers:
        turns = corpus.speaker_turns(speaker)
        assert np.all(np.abs(turns.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(turns.var(axis=0) - 1.0) < 1e-6)


def test_normalization_is_idempotent():
    once = normalize_per_speaker(generate_synthetic(small_synth_spec()))
    twice = normalize_per_speaker(once)
    for a, b in zip(once, twice):
        np.testing.assert_allclose(a.features, b.features, atol=1e-9, rtol=0)


def test_speaker_mode_pools_across_conversations():
    a = make_conversation("a", 6, seed=1)
    b = make_conversation("b", 6, seed=2)
    corpus = normalize_per_speaker(Corpus([a, b]))
    per_conv = corpus.speaker_turns("d0-T", conv_id="a")
    assert not np.allclose(per_conv.mean(axis=0), 0.0)
    assert np.allclose(corpus.speaker_turns("d0-T").mean(axis=0), 0.0)


def test_conversation_mode_pools_per_conversation():
    a = make_conversation("a", 6, seed=1)
    b = make_conversation("b", 6, seed=2)
    corpus = normalize_per_speaker(Corpus([a, b]), NormalizationMode.CONVERSATION)
    for conv_id in ("a", "b"):
        turns = corpus.speaker_turns("d0-T", conv_id=conv_id)
        np.testing.assert_allclose(turns.mean(axis=0), 0.0, atol=1e-12)


def test_metadata_and_order_survive():
    corpus = Corpus([make_conversation("b", 4, score=2.0), make_conversation("a", 5, score=1.0)])
    out = normalize_per_speaker(corpus, "speaker")
    assert out.ids == corpus.ids
    assert [c.speakers for c in out] == [c.speakers for c in corpus]


def test_unknown_mode():
    with pytest.raises(ValueError):
        normalize_per_speaker(Corpus([make_conversation("a", 3)]), "dyad")
