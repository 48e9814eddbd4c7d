from abc import ABC, abstractmethod

import numpy as np


class AbstractRegressor(ABC):
    """Maps conversation embeddings to scores."""

    @abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray) -> "AbstractRegressor":
        """Fit on [n × D] embeddings and n scores.

        :return: self, fitted.
        """
        pass

    @abstractmethod
    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predict one score per row of X."""
        pass
