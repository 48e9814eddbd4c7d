from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, validator
from sklearn.model_selection import LeaveOneGroupOut

from convembed.eval.abstracts.regressor import AbstractRegressor
from convembed.eval.concrete.kernel_ridge import RBFKernelRidge
from convembed.eval.statistics import r_squared
from convembed.utils.errors import ShapeError, StatisticsError
from convembed.utils.logging_factory import LoggingFactory


class RegressorConfig(BaseModel):
    lam: float = Field(1.0, description="Ridge penalty λ.")
    gamma: Optional[float] = Field(
        None, description="RBF width; None uses 1/(D·var) of each fold's training embeddings."
    )

    class Config:
        allow_mutation = False

    @validator("lam")
    def positive_lam(cls, v):
        if not v > 0:
            raise ValueError(f"lam must be positive, got {v}")
        return v

    @validator("gamma")
    def positive_gamma(cls, v):
        if v is not None and not v > 0:
            raise ValueError(f"gamma must be positive, got {v}")
        return v

    def build(self) -> AbstractRegressor:
        return RBFKernelRidge(lam=self.lam, gamma=self.gamma)


class RegressionResult(NamedTuple):
    r2: Optional[float]
    predictions: np.ndarray
    n_folds: int


def _fit_fold(
    cfg: RegressorConfig, X: np.ndarray, y: np.ndarray, train: np.ndarray, test: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    model = cfg.build().fit(X[train], y[train])
    return test, model.predict(X[test])


def lodo_regression(
    embeddings: np.ndarray,
    scores: Sequence[float],
    dyad_ids: Sequence[str],
    cfg: Optional[RegressorConfig] = None,
    workers: int = 1,
) -> RegressionResult:
    """Leave-one-dyad-out predictions and the R² of all of them pooled.

    R² is None when the scores are constant.
    """
    cfg = cfg or RegressorConfig()
    X = np.asarray(embeddings, dtype=np.float64)
    y = np.asarray(scores, dtype=np.float64)
    groups = np.asarray(dyad_ids)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or y.shape[0] != groups.shape[0]:
        raise ShapeError(f"lodo_regression: {X.shape} embeddings, {y.shape[0]} scores, {groups.shape[0]} dyad ids")
    n_dyads = len(set(groups.tolist()))
    if n_dyads < 2:
        raise StatisticsError(f"lodo_regression needs at least 2 dyads, got {n_dyads}")

    folds: List[Tuple[np.ndarray, np.ndarray]] = list(LeaveOneGroupOut().split(X, y, groups))
    predictions = np.empty_like(y)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for test, predicted in pool.map(lambda f: _fit_fold(cfg, X, y, *f), folds):
            predictions[test] = predicted

    r2 = r_squared(predictions, y)
    LoggingFactory.get_logger("eval").debug(f"LODO regression over {len(folds)} dyads: R² = {r2}")
    return RegressionResult(r2=r2, predictions=predictions, n_folds=len(folds))
