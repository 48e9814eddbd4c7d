from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from convembed.utils.errors import CorpusFormatError
from convembed.utils.logging_factory import LoggingFactory


class TurnRecord(BaseModel):
    """One speaker turn as it appears in a corpus file."""

    speaker_id: str = Field(..., alias="speaker", description="Speaker of the turn.")
    features: List[float] = Field(..., description="Acoustic feature vector of the turn.")

    class Config:
        allow_population_by_field_name = True


class Conversation(BaseModel):
    """An ordered sequence of speaker turns with its dyad and empathy score.

    Turn features are held as one [turns × feat_dim] float64 array.
    """

    conv_id: str = Field(..., description="Unique conversation identifier.")
    dyad_id: str = Field(..., description="Therapist-client pair the conversation belongs to.")
    score: float = Field(..., description="Whole-conversation empathy rating.")
    speakers: Tuple[str, ...] = Field(..., description="Speaker id of every turn, in order.")
    features: np.ndarray = Field(..., description="Turn features, one row per turn.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("features", pre=True)
    def as_matrix(cls, v):
        v = np.array(v, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError(f"features must be a non-empty [turns × feat_dim] matrix, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("features must be finite")
        v.setflags(write=False)
        return v

    @root_validator(skip_on_failure=True)
    def one_speaker_per_turn(cls, values):
        n_speakers, n_turns = len(values["speakers"]), values["features"].shape[0]
        if n_speakers != n_turns:
            raise ValueError(f"{n_speakers} speaker ids for {n_turns} turns")
        return values

    @property
    def n_turns(self) -> int:
        return int(self.features.shape[0])

    @property
    def feat_dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def turns(self) -> List[TurnRecord]:
        return [
            TurnRecord(speaker_id=s, features=row.tolist())
            for s, row in zip(self.speakers, self.features)
        ]

    @classmethod
    def from_turns(
        cls, conv_id: str, dyad_id: str, score: float, turns: Sequence[TurnRecord]
    ) -> "Conversation":
        return cls(
            conv_id=conv_id,
            dyad_id=dyad_id,
            score=score,
            speakers=tuple(t.speaker_id for t in turns),
            features=[t.features for t in turns],
        )

    def with_features(self, features: np.ndarray) -> "Conversation":
        return Conversation(
            conv_id=self.conv_id,
            dyad_id=self.dyad_id,
            score=self.score,
            speakers=self.speakers,
            features=features,
        )


class Corpus:
    """Conversations ordered by ascending score, ties broken by conv_id.

    Position i (1-based) is the conversation C_i of the score ordering.
    """

    def __init__(self, conversations: Sequence[Conversation], check_speakers: bool = True):
        if not conversations:
            raise CorpusFormatError("a corpus needs at least one conversation")
        feat_dims = {c.feat_dim for c in conversations}
        if len(feat_dims) != 1:
            raise CorpusFormatError(f"inconsistent feature lengths {sorted(feat_dims)}")
        seen = set()
        for c in conversations:
            if c.conv_id in seen:
                raise CorpusFormatError(f"duplicate conv_id {c.conv_id!r}")
            seen.add(c.conv_id)
        self.conversations: Tuple[Conversation, ...] = tuple(
            sorted(conversations, key=lambda c: (c.score, c.conv_id))
        )
        self.feat_dim = feat_dims.pop()
        self._index: Dict[str, int] = {c.conv_id: i for i, c in enumerate(self.conversations)}

        if check_speakers:
            logger = LoggingFactory.get_logger("corpus")
            for c in self.conversations:
                n_speakers = len(set(c.speakers))
                if n_speakers != 2:
                    logger.warning(f"Conversation {c.conv_id} has {n_speakers} distinct speakers, expected 2")

    def __len__(self) -> int:
        return len(self.conversations)

    def __iter__(self) -> Iterator[Conversation]:
        return iter(self.conversations)

    def __getitem__(self, i: int) -> Conversation:
        return self.conversations[i]

    def get(self, conv_id: str) -> Conversation:
        return self.conversations[self._index[conv_id]]

    def position(self, conv_id: str) -> int:
        """1-based position of a conversation in the score ordering."""
        return self._index[conv_id] + 1

    def at(self, position: int) -> Conversation:
        """Conversation C_position (1-based)."""
        return self.conversations[position - 1]

    @property
    def ids(self) -> List[str]:
        return [c.conv_id for c in self.conversations]

    @property
    def scores(self) -> np.ndarray:
        return np.array([c.score for c in self.conversations])

    @property
    def max_turns(self) -> int:
        return max(c.n_turns for c in self.conversations)

    @property
    def dyads(self) -> List[str]:
        return sorted({c.dyad_id for c in self.conversations})

    def replace_conversations(self, conversations: Sequence[Conversation]) -> "Corpus":
        return Corpus(conversations, check_speakers=False)

    def speaker_turns(self, speaker_id: str, conv_id: Optional[str] = None) -> np.ndarray:
        rows = [
            c.features[np.array(c.speakers) == speaker_id]
            for c in self.conversations
            if conv_id is None or c.conv_id == conv_id
        ]
        return np.concatenate(rows, axis=0)
