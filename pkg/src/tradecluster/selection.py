"""Choosing the number of clusters and scoring clusterings."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .affinity import SimilarityMatrix
from .errors import EmptyInput, NotSorted, RangeInvalid, SingleCluster, TooShort
from .kmeans import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, DEFAULT_TOL, ClusteringResult, kmeans
from .spectral import (
    SYMMETRIC,
    EigenSystem,
    canonical_variant,
    default_row_normalize,
    eigendecompose_symmetric,
    embed,
    laplacian,
)

EMBEDDING = "embedding"
FEATURES = "features"
SILHOUETTE_SPACES = (EMBEDDING, FEATURES)


def eigen_gaps(eigenvalues: Sequence[float]) -> np.ndarray:
    """Consecutive differences; element ``i - 1`` holds the gap after the i-th eigenvalue."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size < 2:
        raise TooShort(f"need at least 2 eigenvalues, got {lam.size}")
    gaps = np.diff(lam)
    if np.any(gaps < -1e-12):
        raise NotSorted("eigenvalues must be in ascending order")
    return gaps


def optimal_k_eigengap(gaps: Sequence[float], k_min: int = 2, k_max: int | None = None) -> int:
    """Index i in [k_min, k_max] (1-based) of the largest gap; lowest index on ties."""
    gaps = np.asarray(gaps, dtype=float)
    if k_max is None:
        k_max = gaps.size
    if not (1 <= k_min <= k_max <= gaps.size):
        raise RangeInvalid(f"need 1 <= k_min <= k_max <= {gaps.size}, got [{k_min}, {k_max}]")
    window = gaps[k_min - 1:k_max]
    return k_min + int(np.argmax(window))


def silhouette(points, labels) -> tuple[np.ndarray, float]:
    """Per-point silhouette values and their unweighted mean.

    Points alone in their cluster score 0.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    labels = np.asarray(labels)
    n = X.shape[0]
    if n == 0:
        raise EmptyInput("no points to score")
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    uniq, inv = np.unique(labels, return_inverse=True)
    if uniq.size < 2:
        raise SingleCluster("silhouette needs at least 2 distinct clusters")

    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    member = np.zeros((n, uniq.size))
    member[np.arange(n), inv] = 1.0
    sizes = member.sum(axis=0)
    sums = dist @ member

    own = sizes[inv]
    a = np.zeros(n)
    multi = own > 1
    a[multi] = sums[multi, inv[multi]] / (own[multi] - 1)
    mean_to = sums / sizes
    mean_to[np.arange(n), inv] = np.inf
    b = mean_to.min(axis=1)

    denom = np.maximum(a, b)
    s = np.zeros(n)
    ok = multi & (denom > 0)
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    return s, float(s.mean())


@dataclass(frozen=True)
class SweepConfig:
    variant: str = SYMMETRIC
    row_normalize: bool | None = None
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL
    silhouette_space: str = EMBEDDING

    def resolved_row_normalize(self) -> bool:
        if self.row_normalize is None:
            return default_row_normalize(self.variant)
        return self.row_normalize


@dataclass
class SelectionReport:
    eigenvalues: np.ndarray
    gaps: np.ndarray
    chosen_k: int
    k_range: tuple[int, int]
    silhouette_by_k: dict[int, float]
    silhouette_space: str
    variant: str
    clusterings: dict[int, ClusteringResult] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "gaps": [float(v) for v in self.gaps],
            "chosen_k": int(self.chosen_k),
            "k_range": list(self.k_range),
            "silhouette_by_k": {str(k): float(v) for k, v in sorted(self.silhouette_by_k.items())},
            "silhouette_space": self.silhouette_space,
            "laplacian": self.variant,
        }


def cluster_embedding(E: EigenSystem, k: int, config: SweepConfig):
    U = embed(E, k, config.resolved_row_normalize())
    result = kmeans(U, k, seed=config.seed, restarts=config.restarts,
                    max_iter=config.max_iter, tol=config.tol)
    return U, result


def sweep_k(
    S: SimilarityMatrix,
    k_range: tuple[int, int],
    config: SweepConfig | None = None,
    features=None,
    eigensystem: EigenSystem | None = None,
) -> SelectionReport:
    """Cluster at every k in ``k_range`` and record the mean silhouette of each.

    The eigen-gap choice is searched over the same range. ``features`` is
    required when scoring in feature space.
    """
    config = config or SweepConfig()
    n = S.n
    k_min, k_max = k_range
    if not (2 <= k_min <= k_max <= n - 1):
        raise RangeInvalid(f"k range must satisfy 2 <= k_min <= k_max <= {n - 1}, got [{k_min}, {k_max}]")
    if config.silhouette_space not in SILHOUETTE_SPACES:
        raise ValueError(f"silhouette space must be one of {SILHOUETTE_SPACES}")
    if config.silhouette_space == FEATURES:
        if features is None:
            raise ValueError("feature-space silhouette requires the feature matrix")
        features = getattr(features, "X", features)

    if eigensystem is None:
        eigensystem = eigendecompose_symmetric(laplacian(S, config.variant))
    gaps = eigen_gaps(eigensystem.eigenvalues)
    chosen = optimal_k_eigengap(gaps, k_min, k_max)

    scores, results = {}, {}
    for k in range(k_min, k_max + 1):
        U, res = cluster_embedding(eigensystem, k, config)
        space = U.U if config.silhouette_space == EMBEDDING else features
        scores[k] = silhouette(space, res.labels)[1]
        results[k] = res
    return SelectionReport(
        eigenvalues=eigensystem.eigenvalues,
        gaps=gaps,
        chosen_k=chosen,
        k_range=(k_min, k_max),
        silhouette_by_k=scores,
        silhouette_space=config.silhouette_space,
        variant=canonical_variant(config.variant),
        clusterings=results,
    )
