from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import betainc

from convembed.utils.errors import StatisticsError


class PearsonResult(NamedTuple):
    rho: float
    p_value: float


class MAEStats(NamedTuple):
    mean: float
    sd: float
    abs_diffs: np.ndarray


def pearson(x: Sequence[float], y: Sequence[float]) -> PearsonResult:
    """Sample Pearson ρ with a two-sided Student-t p-value on n − 2 degrees of freedom."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise StatisticsError(f"pearson: inputs must be equal-length vectors, got {x.shape} and {y.shape}")
    n = x.shape[0]
    if n < 3:
        raise StatisticsError(f"pearson: need at least 3 observations, got {n}")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise StatisticsError("pearson: correlation is undefined for a constant input")

    rho = float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    df = n - 2
    if abs(rho) == 1.0:
        return PearsonResult(rho, 0.0)
    t_squared = rho * rho * df / (1.0 - rho * rho)
    p = float(betainc(0.5 * df, 0.5, df / (df + t_squared)))
    return PearsonResult(rho, min(max(p, 0.0), 1.0))


def mae_stats(predictions: Sequence[float], truths: Sequence[float]) -> MAEStats:
    """Absolute prediction errors with their mean and population standard deviation."""
    predictions = np.asarray(predictions, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.float64)
    if predictions.shape != truths.shape:
        raise StatisticsError(f"mae_stats: {predictions.shape[0]} predictions for {truths.shape[0]} truths")
    if predictions.size == 0:
        raise StatisticsError("mae_stats: no predictions")
    diffs = np.abs(predictions - truths)
    return MAEStats(float(diffs.mean()), float(diffs.std()), diffs)


def r_squared(predictions: Sequence[float], truths: Sequence[float]):
    """1 − SS_res/SS_tot, or None when the truths are constant."""
    predictions = np.asarray(predictions, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.float64)
    ss_tot = float(((truths - truths.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return None
    ss_res = float(((truths - predictions) ** 2).sum())
    return 1.0 - ss_res / ss_tot
