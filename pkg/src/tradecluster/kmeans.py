"""Seeded k-means++ / Lloyd clustering of embedding rows."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KOutOfRange
from .spectral import SpectralEmbedding

DEFAULT_RESTARTS = 20
DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-9

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ClusteringResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    seed: int
    restarts_used: int
    iterations: int
    best_restart: int = 0

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Philox counter-based stream keyed by (seed, restart index).

    The key packs both 64-bit words, so streams never overlap and do not
    depend on how many restarts ran before.
    """
    key = (int(seed) & _U64) | ((int(restart) & _U64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def _points(U) -> np.ndarray:
    if isinstance(U, SpectralEmbedding):
        U = U.U
    U = np.asarray(U, dtype=float)
    return U[:, None] if U.ndim == 1 else U


def _sq_dist(U: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = U[:, None, :] - C[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kmeanspp_init(U, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of k rows chosen by D^2 sampling; first pick is uniform."""
    U = _points(U)
    n = U.shape[0]
    if not (1 <= k <= n):
        raise KOutOfRange(f"k must lie in [1, {n}], got {k}")
    chosen = [int(rng.integers(n))]
    closest = _sq_dist(U, U[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            cum = np.cumsum(closest)
            idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
            idx = min(idx, n - 1)
            # guard against landing on a zero-weight row through round-off
            while closest[idx] == 0:
                idx -= 1
        else:
            # every remaining row duplicates a chosen one
            remaining = np.setdiff1d(np.arange(n), chosen)
            idx = int(remaining[rng.integers(remaining.size)])
        chosen.append(idx)
        closest = np.minimum(closest, _sq_dist(U, U[[idx]])[:, 0])
    return np.array(chosen)


def _repair_empty(U, labels, centroids, k) -> np.ndarray:
    counts = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(counts == 0):
        d = np.einsum("ij,ij->i", U - centroids[labels], U - centroids[labels])
        d[counts[labels] <= 1] = -1.0
        far = int(np.argmax(d))
        counts[labels[far]] -= 1
        labels[far] = j
        counts[j] = 1
        centroids[j] = U[far]
    return labels


def _lloyd(U, centroids, max_iter, tol, check_monotone=False):
    k = centroids.shape[0]
    prev_inertia = np.inf
    it = 0
    while True:
        labels = np.argmin(_sq_dist(U, centroids), axis=1)
        labels = _repair_empty(U, labels, centroids, k)
        new = np.stack([U[labels == j].mean(axis=0) for j in range(k)])
        shift = float(np.abs(new - centroids).max())
        centroids = new
        it += 1
        if check_monotone:
            inertia = _inertia(U, labels, centroids)
            assert inertia <= prev_inertia * (1 + 1e-12) + 1e-15, "inertia increased"
            prev_inertia = inertia
        if shift < tol or it >= max_iter:
            break
    return labels, centroids, it


def _inertia(U, labels, centroids) -> float:
    r = U - centroids[labels]
    return float(np.einsum("ij,ij->", r, r))


def kmeans(
    U,
    k: int,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    check_monotone: bool = False,
) -> ClusteringResult:
    """Best-of-``restarts`` Lloyd iterations from k-means++ starts.

    The restart with the lowest inertia wins; ties go to the earlier restart.
    Assignment ties go to the lowest centroid index.
    """
    U = _points(U)
    n = U.shape[0]
    if not (1 <= k <= n):
        raise KOutOfRange(f"k must lie in [1, {n}], got {k}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if not tol >= 0:
        raise ValueError(f"tol must be non-negative, got {tol}")

    best = None
    for r in range(restarts):
        rng = restart_rng(seed, r)
        start = U[kmeanspp_init(U, k, rng)].copy()
        labels, centroids, it = _lloyd(U, start, max_iter, tol, check_monotone)
        inertia = _inertia(U, labels, centroids)
        if best is None or inertia < best[0]:
            best = (inertia, labels, centroids, it, r)
    inertia, labels, centroids, it, r = best
    return ClusteringResult(labels, centroids, inertia, int(seed), restarts, it, r)
