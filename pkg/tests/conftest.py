from typing import List, Optional

import numpy as np
import pytest

from convembed.corpus.models import Conversation, Corpus
from convembed.corpus.synthetic import SynthSpec
from convembed.encoder.config import EncoderConfig


def tiny_config(**overrides) -> EncoderConfig:
    values = dict(
        feat_dim=5,
        turns_per_section=2,
        sections=3,
        turn_hidden=3,
        section_hidden=2,
        turn_ctx_dim=6,
        section_ctx_dim=4,
    )
    values.update(overrides)
    return EncoderConfig(**values)


def make_conversation(
    conv_id: str,
    n_turns: int,
    feat_dim: int = 5,
    score: float = 30.0,
    dyad_id: str = "d0",
    seed: int = 0,
    speakers: Optional[List[str]] = None,
) -> Conversation:
    rng = np.random.default_rng(seed)
    if speakers is None:
        speakers = [f"{dyad_id}-T" if t % 2 == 0 else f"{dyad_id}-C" for t in range(n_turns)]
    return Conversation(
        conv_id=conv_id,
        dyad_id=dyad_id,
        score=score,
        speakers=tuple(speakers),
        features=rng.normal(size=(n_turns, feat_dim)),
    )


def make_corpus(scores, n_turns: int = 5, feat_dim: int = 5, per_dyad: int = 2) -> Corpus:
    return Corpus(
        [
            make_conversation(
                f"c{i:03d}",
                n_turns + (i % 3),
                feat_dim=feat_dim,
                score=float(s),
                dyad_id=f"d{i // per_dyad}",
                seed=i,
            )
            for i, s in enumerate(scores)
        ]
    )


def small_synth_spec(**overrides) -> SynthSpec:
    values = dict(
        n_conversations=24,
        n_dyads=6,
        conversations_per_dyad=4,
        feat_dim=8,
        turns_mean=20.0,
        turns_sd=6.0,
        turns_min=8,
        turns_max=40,
        signal_dims=4,
        seed=3,
    )
    values.update(overrides)
    return SynthSpec(**values)


@pytest.fixture
def cfg() -> EncoderConfig:
    return tiny_config()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
