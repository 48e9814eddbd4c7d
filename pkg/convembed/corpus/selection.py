from typing import List, NamedTuple, Optional

from pydantic import BaseModel, Field, validator

from convembed.corpus.models import Corpus
from convembed.utils.errors import SelectionError

# a 156-conversation corpus keeps its middle 96 conversations for testing
FULL_CORPUS_SIZE = 156
FULL_CORPUS_TEST_MARGIN = 30


class SelectionSpec(BaseModel):
    """Which extreme-score conversations form the two training groups."""

    k: int = Field(20, description="K, conversations per group.")
    offset: int = Field(0, description="o, conversations skipped at each extreme.")
    test_margin: Optional[int] = Field(
        None,
        description="Conversations excluded from the test block at each end; "
        "None means 30 on a 156-conversation corpus, K + o otherwise.",
    )

    class Config:
        allow_mutation = False

    @validator("k")
    def positive_k(cls, v):
        if v < 1:
            raise ValueError(f"K must be at least 1, got {v}")
        return v

    @validator("offset")
    def non_negative_offset(cls, v):
        if v < 0:
            raise ValueError(f"offset must be non-negative, got {v}")
        return v

    @property
    def label(self) -> str:
        return f"{self.k}" if self.offset == 0 else f"{self.k}({self.offset})"

    def margin_for(self, n: int) -> int:
        if self.test_margin is not None:
            return self.test_margin
        return FULL_CORPUS_TEST_MARGIN if n == FULL_CORPUS_SIZE else self.k + self.offset


class Selection(NamedTuple):
    low: List[str]
    high: List[str]
    test: List[str]


def select_extremes(corpus: Corpus, spec: SelectionSpec) -> Selection:
    """Low group C_{1+o}…C_{K+o}, high group C_{n−K+1−o}…C_{n−o}, middle test block."""
    n = len(corpus)
    k, o = spec.k, spec.offset
    if 2 * (k + o) > n:
        raise SelectionError(f"groups overlap: 2·(K + o) = {2 * (k + o)} exceeds corpus size {n}")
    margin = spec.margin_for(n)
    if margin < k + o:
        raise SelectionError(
            f"test block C_{margin + 1}…C_{n - margin} overlaps the training groups (K + o = {k + o})"
        )

    ids = corpus.ids
    low = ids[o : o + k]
    high = ids[n - k - o : n - o]
    test = ids[margin : n - margin]
    return Selection(low=low, high=high, test=test)
