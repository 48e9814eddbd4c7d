from enum import Enum
from typing import Dict, Hashable, List, Tuple

import numpy as np

from convembed.corpus.models import Corpus
from convembed.utils.logging_factory import LoggingFactory

# relative spread below which a feature dimension counts as constant
ZERO_VARIANCE_RTOL = 1e-12


class NormalizationMode(str, Enum):
    SPEAKER = "speaker"
    CONVERSATION = "conversation"


def normalize_per_speaker(corpus: Corpus, mode: NormalizationMode = NormalizationMode.SPEAKER) -> Corpus:
    """Z-score every feature dimension over all turns of the same speaker.

    In speaker mode a speaker's turns are pooled across all their
    conversations; in conversation mode each (conversation, speaker) pair is
    its own pool. Constant dimensions map to 0.
    """
    mode = NormalizationMode(mode)
    logger = LoggingFactory.get_logger("corpus")

    pools: Dict[Hashable, List[Tuple[int, np.ndarray]]] = {}
    for ci, conv in enumerate(corpus):
        speakers = np.array(conv.speakers)
        for speaker in sorted(set(conv.speakers)):
            key = speaker if mode == NormalizationMode.SPEAKER else (conv.conv_id, speaker)
            pools.setdefault(key, []).append((ci, np.flatnonzero(speakers == speaker)))

    normalized = [np.array(conv.features, copy=True) for conv in corpus]
    n_constant = 0
    for key, members in pools.items():
        stacked = np.concatenate([corpus[ci].features[rows] for ci, rows in members], axis=0)
        mean = stacked.mean(axis=0)
        std = stacked.std(axis=0)
        constant = std <= ZERO_VARIANCE_RTOL * np.maximum(1.0, np.abs(mean))
        n_constant += int(constant.sum())
        safe_std = np.where(constant, 1.0, std)
        for ci, rows in members:
            z = (corpus[ci].features[rows] - mean) / safe_std
            z[:, constant] = 0.0
            normalized[ci][rows] = z

    logger.debug(f"Normalized {len(pools)} speaker pools ({mode.value} mode), {n_constant} constant dims zeroed")
    return corpus.replace_conversations(
        [conv.with_features(features) for conv, features in zip(corpus, normalized)]
    )
