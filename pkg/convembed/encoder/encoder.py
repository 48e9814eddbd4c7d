from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from convembed.corpus.models import Conversation
from convembed.encoder.config import EncoderConfig
from convembed.encoder.layers import attend, bigru_encode
from convembed.encoder.params import BoundParams, EncoderParams
from convembed.encoder.sectioning import SectionGrid, section_conversation
from convembed.numeric import ops
from convembed.numeric.tape import Node, Tape


class Embedding(BaseModel):
    conv_id: str = Field(..., description="Conversation the embedding was computed from.")
    vector: np.ndarray = Field(..., description="Conversation embedding x, length 2·section_hidden.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


class AttentionTrace(BaseModel):
    turn_weights: np.ndarray = Field(..., description="[M × N] turn attention α_{i,j}.")
    section_weights: np.ndarray = Field(..., description="[M] section attention α_i.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


class BatchEncoding:
    """Embeddings of several conversations computed in one pass.

    embeddings is a [B × 2·section_hidden] node, recorded on the tape the
    batch was encoded on (a constant without tape).
    """

    def __init__(self, conv_ids: List[str], embeddings: Node, traces: List[AttentionTrace]):
        self.conv_ids = conv_ids
        self.embeddings = embeddings
        self.traces = traces

    def embedding(self, i: int) -> Embedding:
        return Embedding(conv_id=self.conv_ids[i], vector=np.array(self.embeddings.value[i]))


class ConversationEncoder:
    """Hierarchical attention encoder: turn BiGRU + attention per section,
    then section BiGRU + attention over the sections.
    """

    def __init__(self, cfg: EncoderConfig, params: EncoderParams):
        self.cfg = cfg
        self.params = params

    def grids(self, conversations: Sequence[Conversation]) -> List[SectionGrid]:
        cfg = self.cfg
        if cfg.sections is None:
            cfg = cfg.fit_sections(max(c.n_turns for c in conversations))
        return [section_conversation(c, cfg) for c in conversations]

    def encode_batch(
        self, conversations: Sequence[Conversation], tape: Optional[Tape] = None
    ) -> Tuple[BatchEncoding, List[Node]]:
        """Encode conversations together; returns the encoding and the watched parameter nodes."""
        return self.encode_grids([c.conv_id for c in conversations], self.grids(conversations), tape)

    def encode_grids(
        self, conv_ids: List[str], grids: List[SectionGrid], tape: Optional[Tape] = None
    ) -> Tuple[BatchEncoding, List[Node]]:
        """Encode already-sectioned conversations; grids must share one M."""
        bound, param_nodes = self.params.bind(tape)
        encoding = self.forward(grids, bound)
        encoding.conv_ids = list(conv_ids)
        return encoding, param_nodes

    def encode(self, conv: Conversation) -> Tuple[Embedding, AttentionTrace]:
        encoding, _ = self.encode_batch([conv])
        return encoding.embedding(0), encoding.traces[0]

    def forward(self, grids: List[SectionGrid], bound: BoundParams) -> BatchEncoding:
        """Encode grids with parameters already bound (raw arrays or tape variables)."""
        M, N = grids[0].n_sections, grids[0].turns_per_section
        B = len(grids)

        if self.cfg.mask_padding:
            section_mask = np.stack([g.section_mask for g in grids])
            n_steps = int(section_mask.sum(axis=1).max())
            section_mask = section_mask[:, :n_steps]
        else:
            section_mask = np.ones((B, M), dtype=bool)
            n_steps = M

        # one turn-level row per (conversation, section) that takes part
        row_of = np.full((B, n_steps), -1, dtype=np.int64)
        features, turn_mask = [], []
        for b, grid in enumerate(grids):
            for i in np.flatnonzero(section_mask[b]):
                row_of[b, i] = len(features)
                features.append(grid.features[i])
                turn_mask.append(grid.mask[i] if self.cfg.mask_padding else np.ones(N, dtype=bool))
        features = np.stack(features)
        turn_mask = np.stack(turn_mask)

        turn_hidden = bigru_encode(
            [features[:, t, :] for t in range(N)],
            turn_mask,
            bound.gru("turn_fwd"),
            bound.gru("turn_bwd"),
        )
        sections, turn_alpha = attend(turn_hidden, turn_mask, bound.attention("turn_attention"))

        section_inputs = [ops.gather_rows(sections, row_of[:, i]) for i in range(n_steps)]
        section_hidden = bigru_encode(
            section_inputs,
            section_mask,
            bound.gru("section_fwd"),
            bound.gru("section_bwd"),
        )
        embeddings, section_alpha = attend(
            section_hidden, section_mask, bound.attention("section_attention")
        )

        traces = []
        for b in range(B):
            turn_weights = np.zeros((M, N))
            section_weights = np.zeros(M)
            for i in np.flatnonzero(section_mask[b]):
                turn_weights[i] = turn_alpha.value[row_of[b, i]]
                section_weights[i] = section_alpha.value[b, i]
            traces.append(AttentionTrace(turn_weights=turn_weights, section_weights=section_weights))
        return BatchEncoding([], embeddings, traces)


def encode_conversation(
    conv: Conversation, cfg: EncoderConfig, params: EncoderParams
) -> Tuple[Embedding, AttentionTrace]:
    return ConversationEncoder(cfg, params).encode(conv)
