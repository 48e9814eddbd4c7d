from enum import Enum
from typing import List, Mapping, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator

from convembed.corpus.models import Corpus
from convembed.utils.errors import SelectionError, ShapeError


class ReferenceKind(str, Enum):
    LOW = "low"
    HIGH = "high"


class ReferenceSet(BaseModel):
    kind: ReferenceKind = Field(..., description="Whether the references are the lowest or highest scored.")
    conv_ids: List[str] = Field(..., description="Reference conversations, in ascending score order.")
    embeddings: np.ndarray = Field(..., description="[R × D] reference embeddings, rows matching conv_ids.")

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def rows_match_ids(cls, values):
        embeddings = np.asarray(values["embeddings"], dtype=np.float64)
        if embeddings.ndim != 2 or embeddings.shape[0] != len(values["conv_ids"]) or not values["conv_ids"]:
            raise ValueError(
                f"{len(values['conv_ids'])} reference ids for embeddings of shape {embeddings.shape}"
            )
        values["embeddings"] = embeddings
        return values

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]


def build_reference_sets(
    corpus: Corpus, embeddings: Mapping[str, np.ndarray], n_references: int = 10
) -> Tuple[ReferenceSet, ReferenceSet]:
    """The n lowest and n highest scored conversations of the whole corpus."""
    if not 1 <= n_references <= len(corpus) // 2:
        raise SelectionError(f"cannot take {n_references} references at each end of {len(corpus)} conversations")
    ids = corpus.ids
    low_ids, high_ids = ids[:n_references], ids[len(ids) - n_references :]
    return (
        ReferenceSet(kind=ReferenceKind.LOW, conv_ids=low_ids, embeddings=np.stack([embeddings[c] for c in low_ids])),
        ReferenceSet(kind=ReferenceKind.HIGH, conv_ids=high_ids, embeddings=np.stack([embeddings[c] for c in high_ids])),
    )


def reference_distance(test_embedding: np.ndarray, refs: ReferenceSet) -> float:
    """Mean Euclidean distance from one embedding to every reference."""
    test_embedding = np.asarray(test_embedding, dtype=np.float64)
    if test_embedding.shape != (refs.dim,):
        raise ShapeError(f"reference_distance: embedding {test_embedding.shape} vs references of dim {refs.dim}")
    return float(np.linalg.norm(refs.embeddings - test_embedding, axis=1).mean())
