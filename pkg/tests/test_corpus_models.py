import logging

import numpy as np
import pytest
from pydantic import ValidationError

from convembed.corpus.models import Conversation, Corpus, TurnRecord
from convembed.utils.errors import CorpusFormatError
from convembed.utils.logging_factory import LoggingFactory

from tests.conftest import make_conversation


def test_corpus_sorts_by_score_then_id():
    corpus = Corpus(
        [
            make_conversation("b", 3, score=30.0),
            make_conversation("a", 3, score=20.0),
            make_conversation("d", 3, score=40.0),
            make_conversation("c", 3, score=30.0),
        ]
    )
    assert corpus.ids == ["a", "b", "c", "d"]
    assert corpus.scores.tolist() == [20.0, 30.0, 30.0, 40.0]
    assert corpus.position("c") == 3
    assert corpus.at(1).conv_id == "a"


def test_duplicate_ids_are_rejected():
    with pytest.raises(CorpusFormatError, match="duplicate"):
        Corpus([make_conversation("a", 3), make_conversation("a", 4)])


def test_inconsistent_feature_lengths_are_rejected():
    with pytest.raises(CorpusFormatError):
        Corpus([make_conversation("a", 3, feat_dim=5), make_conversation("b", 3, feat_dim=4)])


def test_speaker_count_mismatch_is_a_validation_error():
    with pytest.raises(ValidationError):
        Conversation(conv_id="a", dyad_id="d", score=1.0, speakers=("x",), features=np.zeros((2, 3)))


def test_non_finite_features_are_rejected():
    with pytest.raises(ValidationError):
        Conversation(conv_id="a", dyad_id="d", score=1.0, speakers=("x",), features=[[np.nan, 1.0]])


def test_features_are_read_only():
    conv = make_conversation("a", 3)
    with pytest.raises(ValueError):
        conv.features[0, 0] = 1.0


def test_unusual_speaker_count_only_warns(caplog):
    logger = LoggingFactory.get_logger("corpus")
    logger.propagate = True
    try:
        with caplog.at_level(logging.WARNING, logger="corpus"):
            corpus = Corpus([make_conversation("a", 3, speakers=["x", "y", "z"])])
    finally:
        logger.propagate = False
    assert len(corpus) == 1
    assert "3 distinct speakers" in caplog.text


def test_turn_records_round_trip():
    conv = make_conversation("a", 4)
    rebuilt = Conversation.from_turns("a", conv.dyad_id, conv.score, conv.turns)
    assert rebuilt.speakers == conv.speakers
    np.testing.assert_array_equal(rebuilt.features, conv.features)
    assert TurnRecord(speaker="x", features=[1.0]).speaker_id == "x"


def test_speaker_turns_pools_across_conversations():
    corpus = Corpus([make_conversation("a", 4), make_conversation("b", 3)])
    assert corpus.speaker_turns("d0-T").shape == (4, 5)
    assert corpus.speaker_turns("d0-T", conv_id="b").shape == (2, 5)
