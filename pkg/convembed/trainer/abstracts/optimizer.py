from abc import ABC, abstractmethod
from typing import List

import numpy as np


class AbstractOptimizer(ABC):
    """Turns parameter gradients into updated parameters, one step at a time."""

    @abstractmethod
    def step(self, params: List[np.ndarray], grads: List[np.ndarray]) -> List[np.ndarray]:
        """Apply one update.

        :param params: Current parameter arrays, never modified in place.
        :param grads: Gradients matching params in order and shape.
        :return: The updated parameter arrays.
        """
        pass

    @property
    @abstractmethod
    def steps_taken(self) -> int:
        pass
