import numpy as np
from pydantic import BaseModel, Field

from convembed.corpus.models import Conversation
from convembed.encoder.config import EncoderConfig
from convembed.utils.errors import CapacityError, ShapeError


class SectionGrid(BaseModel):
    """Turn features laid out row-major into M sections of N turns, zero-padded."""

    features: np.ndarray = Field(..., description="[M × N × feat_dim] turn features.")
    mask: np.ndarray = Field(..., description="[M × N] bool, set where a real turn sits.")
    real_turn_count: int = Field(..., description="Number of real turns.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @property
    def n_sections(self) -> int:
        return int(self.mask.shape[0])

    @property
    def turns_per_section(self) -> int:
        return int(self.mask.shape[1])

    @property
    def section_mask(self) -> np.ndarray:
        """[M] bool, set for sections holding at least one real turn."""
        return self.mask.any(axis=1)

    @property
    def real_sections(self) -> int:
        return int(self.section_mask.sum())


def section_conversation(conv: Conversation, cfg: EncoderConfig) -> SectionGrid:
    if conv.feat_dim != cfg.feat_dim:
        raise ShapeError(
            f"conversation {conv.conv_id} has {conv.feat_dim}-dim features, encoder expects {cfg.feat_dim}"
        )
    if cfg.sections is None:
        cfg = cfg.fit_sections(conv.n_turns)
    M, N = cfg.sections, cfg.turns_per_section
    if conv.n_turns > M * N:
        raise CapacityError(
            f"conversation {conv.conv_id} has {conv.n_turns} turns, capacity N·M = {N}·{M} = {M * N}"
        )

    flat = np.zeros((M * N, cfg.feat_dim))
    flat[: conv.n_turns] = conv.features
    mask = np.zeros(M * N, dtype=bool)
    mask[: conv.n_turns] = True
    return SectionGrid(
        features=flat.reshape(M, N, cfg.feat_dim),
        mask=mask.reshape(M, N),
        real_turn_count=conv.n_turns,
    )
