from itertools import combinations, product
from typing import Iterator, List, NamedTuple, Sequence

import numpy as np

from convembed.utils.errors import SelectionError


class Pair(NamedTuple):
    a: str
    b: str
    y: int


class PairSet:
    """Labelled conversation pairs; y = 1 for same-group, 0 for cross-group."""

    def __init__(self, pairs: Sequence[Pair]):
        for p in pairs:
            if p.a == p.b:
                raise SelectionError(f"self-pair on {p.a!r}")
            if p.y not in (0, 1):
                raise SelectionError(f"pair label must be 0 or 1, got {p.y}")
        self.pairs: List[Pair] = list(pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __getitem__(self, i: int) -> Pair:
        return self.pairs[i]

    @property
    def n_positive(self) -> int:
        return sum(p.y for p in self.pairs)

    @property
    def n_negative(self) -> int:
        return len(self.pairs) - self.n_positive

    @property
    def labels(self) -> np.ndarray:
        return np.array([p.y for p in self.pairs], dtype=np.float64)

    def conv_ids(self) -> List[str]:
        """Distinct conversations in order of first appearance."""
        return list(dict.fromkeys(c for p in self.pairs for c in (p.a, p.b)))

    def shuffled(self, seed) -> "PairSet":
        order = np.random.default_rng(seed).permutation(len(self.pairs))
        return PairSet([self.pairs[i] for i in order])

    def batches(self, batch_size: int) -> Iterator["PairSet"]:
        for start in range(0, len(self.pairs), batch_size):
            yield PairSet(self.pairs[start : start + batch_size])


def build_pairs(low_group: Sequence[str], high_group: Sequence[str], seed) -> PairSet:
    """K² − K same-group pairs and K² cross-group pairs, in seeded random order."""
    low, high = list(low_group), list(high_group)
    if len(low) != len(high) or not low:
        raise SelectionError(f"groups must have equal size K ≥ 1, got {len(low)} and {len(high)}")
    if len(set(low)) != len(low) or len(set(high)) != len(high):
        raise SelectionError("a group lists the same conversation twice")
    overlap = sorted(set(low) & set(high))
    if overlap:
        raise SelectionError(f"groups overlap on {overlap}")

    pairs = [Pair(a, b, 1) for group in (low, high) for a, b in combinations(group, 2)]
    pairs += [Pair(a, b, 0) for a, b in product(low, high)]
    return PairSet(pairs).shuffled(seed)
