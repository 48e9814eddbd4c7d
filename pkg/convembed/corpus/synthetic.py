"""Synthetic counseling corpus with a planted empathy signal.

Calibrated to the score and turn-count statistics of a real 156-conversation
corpus. Therapist turns carry a score-dependent shift along a fixed unit
direction w; some of them are "empathic events" where the shift is boosted,
which gives the attention layers a localized target. Client turns carry no
signal. Every speaker has a baseline offset, so per-speaker normalization
matters.

Normalization pools a speaker's turns over all their sessions and so removes
the part of the signal that is shared by a dyad. Scores are therefore dealt to
dyads by stratum: every dyad gets one conversation from each score stratum,
which keeps dyad means close to the corpus mean.
"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator

from convembed.corpus.models import Conversation, Corpus
from convembed.utils.logging_factory import LoggingFactory


class SynthSpec(BaseModel):
    n_conversations: int = Field(156, description="Total conversations.")
    n_dyads: int = Field(39, description="Therapist-client pairs.")
    conversations_per_dyad: int = Field(4, description="Conversations recorded per dyad.")
    feat_dim: int = Field(88, description="Length of a turn feature vector.")
    score_mean: float = Field(38.80, description="Mean empathy score.")
    score_sd: float = Field(7.87, description="Standard deviation of the empathy score.")
    score_min: float = Field(18.0, description="Lowest allowed score.")
    score_max: float = Field(56.5, description="Highest allowed score.")
    turns_mean: float = Field(302.0, description="Mean turns per conversation.")
    turns_sd: float = Field(137.0, description="Standard deviation of turns per conversation.")
    turns_min: int = Field(54, description="Fewest turns in a conversation.")
    turns_max: int = Field(781, description="Most turns in a conversation.")
    signal_dims: int = Field(20, description="Feature dimensions the signal direction spans.")
    signal_scale: float = Field(1.0, description="Shift per score standard deviation along w.")
    noise_sd: float = Field(1.0, description="Per-dimension turn noise.")
    baseline_sd: float = Field(0.5, description="Per-dimension speaker baseline offset.")
    event_boost: float = Field(3.0, description="Signal multiplier on empathic-event turns.")
    stratify_dyads: bool = Field(
        True, description="Deal each dyad one conversation per score stratum instead of independent scores."
    )
    seed: int = Field(0, description="Generator seed.")

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def consistent(cls, values):
        if values["n_conversations"] != values["n_dyads"] * values["conversations_per_dyad"]:
            raise ValueError(
                f"n_conversations ({values['n_conversations']}) must equal "
                f"n_dyads × conversations_per_dyad ({values['n_dyads']} × {values['conversations_per_dyad']})"
            )
        if not values["score_min"] < values["score_max"]:
            raise ValueError("score_min must be below score_max")
        if not 1 <= values["turns_min"] < values["turns_max"]:
            raise ValueError("turns_min must be positive and below turns_max")
        if not 1 <= values["signal_dims"] <= values["feat_dim"]:
            raise ValueError(f"signal_dims must lie in [1, feat_dim], got {values['signal_dims']}")
        return values

    @classmethod
    def half_scale(cls, **overrides) -> "SynthSpec":
        """78 conversations (26 dyads × 3) with halved turn counts."""
        values = dict(
            n_conversations=78,
            n_dyads=26,
            conversations_per_dyad=3,
            turns_mean=151.0,
            turns_sd=68.5,
            turns_min=27,
            turns_max=390,
        )
        values.update(overrides)
        return cls(**values)

    def event_probability(self, score: float) -> float:
        return 0.1 + 0.6 * (score - self.score_min) / (self.score_max - self.score_min)


def therapist_id(dyad_id: str) -> str:
    return f"{dyad_id}-therapist"


def client_id(dyad_id: str) -> str:
    return f"{dyad_id}-client"


def _streams(spec: SynthSpec) -> Tuple[np.random.Generator, np.random.Generator]:
    direction_seq, data_seq = np.random.SeedSequence(spec.seed).spawn(2)
    return np.random.default_rng(direction_seq), np.random.default_rng(data_seq)


def signal_direction(spec: SynthSpec) -> np.ndarray:
    """The unit vector w the planted signal lies along."""
    rng, _ = _streams(spec)
    dims = np.sort(rng.choice(spec.feat_dim, size=spec.signal_dims, replace=False))
    w = np.zeros(spec.feat_dim)
    w[dims] = rng.normal(size=spec.signal_dims)
    return w / np.linalg.norm(w)


def dyad_scores(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    """[n_dyads × conversations_per_dyad] scores, clipped and rounded to 0.5.

    Scores are drawn independently. When stratified, the sorted scores are cut
    into conversations_per_dyad strata of n_dyads each and every dyad receives
    one score from each stratum, in random session order.
    """
    raw = rng.normal(spec.score_mean, spec.score_sd, size=spec.n_conversations)
    scores = np.round(np.clip(raw, spec.score_min, spec.score_max) * 2.0) / 2.0
    if not spec.stratify_dyads:
        return scores.reshape(spec.n_dyads, spec.conversations_per_dyad)
    strata = np.sort(scores).reshape(spec.conversations_per_dyad, spec.n_dyads)
    dealt = np.stack([rng.permutation(stratum) for stratum in strata], axis=1)
    return rng.permuted(dealt, axis=1)


def generate_synthetic(spec: SynthSpec) -> Corpus:
    logger = LoggingFactory.get_logger("synthetic")
    w = signal_direction(spec)
    _, rng = _streams(spec)
    scores = dyad_scores(spec, rng)

    conversations = []
    for d in range(spec.n_dyads):
        dyad_id = f"dyad{d:02d}"
        therapist_baseline = rng.normal(0.0, spec.baseline_sd, size=spec.feat_dim)
        client_baseline = rng.normal(0.0, spec.baseline_sd, size=spec.feat_dim)
        for s in range(spec.conversations_per_dyad):
            score = float(scores[d, s])
            n_turns = int(np.rint(np.clip(rng.normal(spec.turns_mean, spec.turns_sd), spec.turns_min, spec.turns_max)))

            is_therapist = np.arange(n_turns) % 2 == 0
            n_therapist = int(is_therapist.sum())
            features = rng.normal(0.0, spec.noise_sd, size=(n_turns, spec.feat_dim))
            features[is_therapist] += therapist_baseline
            features[~is_therapist] += client_baseline

            g = (score - spec.score_mean) / spec.score_sd
            events = rng.random(n_therapist) < spec.event_probability(score)
            strength = g * spec.signal_scale * np.where(events, spec.event_boost, 1.0)
            features[is_therapist] += strength[:, None] * w

            speakers = tuple(therapist_id(dyad_id) if t else client_id(dyad_id) for t in is_therapist)
            conversations.append(
                Conversation(
                    conv_id=f"{dyad_id}-s{s + 1}",
                    dyad_id=dyad_id,
                    score=score,
                    speakers=speakers,
                    features=features,
                )
            )

    corpus = Corpus(conversations)
    logger.info(
        f"Generated {len(corpus)} conversations over {spec.n_dyads} dyads "
        f"(mean score {corpus.scores.mean():.2f}, max turns {corpus.max_turns})"
    )
    return corpus
