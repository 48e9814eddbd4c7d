from typing import Optional

import numpy as np
from sklearn.kernel_ridge import KernelRidge

from convembed.eval.abstracts.regressor import AbstractRegressor


def default_gamma(X: np.ndarray) -> float:
    """1 / (D · var(X)) over all entries of X."""
    var = float(X.var())
    return 1.0 / (X.shape[1] * var) if var > 0.0 else 1.0 / X.shape[1]


class RBFKernelRidge(AbstractRegressor):
    """Kernel ridge regression with an RBF kernel, fit to centred scores."""

    def __init__(self, lam: float = 1.0, gamma: Optional[float] = None):
        self.lam = lam
        self.gamma = gamma
        self.gamma_: Optional[float] = None
        self.offset_: float = 0.0
        self.model_: Optional[KernelRidge] = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RBFKernelRidge":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        self.gamma_ = self.gamma if self.gamma is not None else default_gamma(X)
        self.offset_ = float(y.mean())
        self.model_ = KernelRidge(alpha=self.lam, kernel="rbf", gamma=self.gamma_)
        self.model_.fit(X, y - self.offset_)
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.model_ is None:
            raise RuntimeError("predict called before fit")
        return self.offset_ + self.model_.predict(np.asarray(X, dtype=np.float64))
