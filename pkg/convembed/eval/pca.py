from typing import NamedTuple

import numpy as np

from convembed.utils.errors import StatisticsError


class PCAResult(NamedTuple):
    coordinates: np.ndarray
    eigenvalues: np.ndarray
    components: np.ndarray
    explained_ratio: float


def pca2(embeddings: np.ndarray) -> PCAResult:
    """Project centred embeddings on the top two eigenvectors of their sample covariance.

    Each component is signed so that its largest-magnitude loading is positive.
    """
    X = np.asarray(embeddings, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 3 or X.shape[1] < 2:
        raise StatisticsError(f"pca2 needs at least 3 embeddings of dimension ≥ 2, got shape {X.shape}")

    centred = X - X.mean(axis=0)
    cov = centred.T @ centred / (X.shape[0] - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:2]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    components = eigenvectors[:, order].T

    for k in range(2):
        if components[k, np.argmax(np.abs(components[k]))] < 0:
            components[k] = -components[k]

    total = float(np.trace(cov))
    return PCAResult(
        coordinates=centred @ components.T,
        eigenvalues=eigenvalues,
        components=components,
        explained_ratio=float(eigenvalues.sum() / total) if total > 0 else 0.0,
    )
