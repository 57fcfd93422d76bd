"""Gaussian similarity matrices and nearest-neighbour sparsification."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import FeatureMatrix
from .errors import DegenerateData, KOutOfRange, NonPositiveSigma, TooFewRows

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class SimilarityMatrix:
    S: np.ndarray
    sigma: float
    sparsified_k: int | None = None

    @property
    def n(self) -> int:
        return self.S.shape[0]


def _rows(X) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        X = X.X
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return X


def pairwise_sq_distances(X) -> np.ndarray:
    X = _rows(X)
    diff = X[:, None, :] - X[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def gaussian_similarity(X, sigma: float) -> SimilarityMatrix:
    """S_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)), unit diagonal.

    Each unordered pair is evaluated once (upper triangle) and mirrored, so
    the result is exactly symmetric.
    """
    X = _rows(X)
    n = X.shape[0]
    if not (sigma > 0) or not np.isfinite(sigma):
        raise NonPositiveSigma(f"sigma must be positive, got {sigma}")
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    iu, ju = np.triu_indices(n, k=1)
    diff = X[iu] - X[ju]
    d2 = np.einsum("ij,ij->i", diff, diff)
    vals = np.exp(-d2 / (2.0 * sigma * sigma))
    vals[vals < _TINY] = 0.0
    S = np.zeros((n, n))
    S[iu, ju] = vals
    S[ju, iu] = vals
    np.fill_diagonal(S, 1.0)
    return SimilarityMatrix(S, float(sigma))


def median_heuristic_sigma(X) -> float:
    """Median of the n(n-1)/2 pairwise Euclidean distances.

    If more than half the pairs coincide the median is zero; the median of
    the strictly positive distances is returned instead.
    """
    X = _rows(X)
    n = X.shape[0]
    if n < 2:
        raise TooFewRows(f"need at least 2 rows, got {n}")
    iu, ju = np.triu_indices(n, k=1)
    diff = X[iu] - X[ju]
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    if not np.any(dist > 0):
        raise DegenerateData("all rows are identical; no bandwidth can be derived")
    sigma = float(np.median(dist))
    if sigma == 0.0:
        sigma = float(np.median(dist[dist > 0]))
    return sigma


def knn_sparsify(sim: SimilarityMatrix, k: int) -> SimilarityMatrix:
    """Keep edge (i, j) when either endpoint is among the other's k most similar.

    Neighbour ties are broken towards the lower index.
    """
    S = sim.S
    n = S.shape[0]
    if not (1 <= k <= n - 1):
        raise KOutOfRange(f"k must lie in [1, {n - 1}], got {k}")
    keep = np.zeros((n, n), dtype=bool)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        order = others[np.argsort(-S[i, others], kind="stable")]
        keep[i, order[:k]] = True
    keep |= keep.T
    out = np.where(keep, S, 0.0)
    np.fill_diagonal(out, 1.0)
    return SimilarityMatrix(out, sim.sigma, k)
