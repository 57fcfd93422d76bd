"""Graph Laplacians, a Jacobi eigensolver and the spectral embedding."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .affinity import SimilarityMatrix
from .errors import KOutOfRange, NoConvergence, NotSymmetric, ZeroDegree

UNNORMALIZED = "unnormalized"
SYMMETRIC = "symmetric-normalized"
_ALIASES = {
    "unnorm": UNNORMALIZED,
    UNNORMALIZED: UNNORMALIZED,
    "sym": SYMMETRIC,
    SYMMETRIC: SYMMETRIC,
}

OFF_TOL = 1e-12
MAX_SWEEPS = 100


def canonical_variant(variant: str) -> str:
    try:
        return _ALIASES[variant]
    except KeyError:
        raise ValueError(f"unknown Laplacian variant {variant!r}; use 'sym' or 'unnorm'") from None


@dataclass(frozen=True)
class LaplacianMatrix:
    L: np.ndarray
    variant: str
    degrees: np.ndarray


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues; column j of ``eigenvectors`` pairs with eigenvalue j."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0
    off_norm: float = 0.0


@dataclass(frozen=True)
class SpectralEmbedding:
    U: np.ndarray
    k: int
    row_normalized: bool


def _matrix(S) -> np.ndarray:
    return S.S if isinstance(S, SimilarityMatrix) else np.asarray(S, dtype=float)


def degree_matrix(S) -> np.ndarray:
    """Row sums of the affinity; returned as a vector rather than a dense diagonal."""
    return _matrix(S).sum(axis=1)


def laplacian(S, variant: str = SYMMETRIC) -> LaplacianMatrix:
    """``D - S`` (unnormalized) or ``I - D^-1/2 S D^-1/2`` (symmetric-normalized)."""
    variant = canonical_variant(variant)
    A = _matrix(S)
    d = degree_matrix(A)
    if np.any(d <= 0):
        raise ZeroDegree(f"non-positive degree at rows {np.flatnonzero(d <= 0).tolist()}")
    if variant == UNNORMALIZED:
        L = np.diag(d) - A
    else:
        inv_sqrt = 1.0 / np.sqrt(d)
        L = np.eye(A.shape[0]) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    L = 0.5 * (L + L.T)
    return LaplacianMatrix(L, variant, d)


@lru_cache(maxsize=32)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Circle-method tournament: n-1 (or n) rounds of disjoint index pairs
    that together cover every pair exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = zip(*pairs)
            rounds.append((np.array(p), np.array(q)))
        players = [players[0], players[-1], *players[1:-1]]
    return tuple(rounds)


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigh(A, tol: float = OFF_TOL, max_sweeps: int = MAX_SWEEPS) -> EigenSystem:
    """Cyclic Jacobi eigendecomposition of a dense symmetric matrix.

    Sweeps follow a fixed round-robin pair order; within a round the pairs are
    disjoint so their rotations commute and are applied together. Iteration
    stops once the off-diagonal Frobenius norm is at most ``tol * ||A||_F``.
    Each eigenvector is signed so its largest-magnitude entry is positive.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise NotSymmetric(f"expected a square matrix, got shape {A.shape}")
    scale = max(1.0, float(np.abs(A).max())) if n else 1.0
    if n and np.abs(A - A.T).max() > 1e-10 * scale:
        raise NotSymmetric(f"asymmetry {np.abs(A - A.T).max():.3e} exceeds tolerance")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    threshold = tol * float(np.sqrt(np.sum(A * A)))
    off = _off_norm(A)
    sweeps = 0
    rounds = _round_robin(n) if n > 1 else ()
    while off > threshold:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})", off)
        for p, q in rounds:
            apq = A[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            Ap, Aq = A[:, p], A[:, q]
            A[:, p], A[:, q] = c * Ap - s * Aq, s * Ap + c * Aq
            Ap, Aq = A[p, :], A[q, :]
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            Vp, Vq = V[:, p], V[:, q]
            V[:, p], V[:, q] = c * Vp - s * Vq, s * Vp + c * Vq
        A = 0.5 * (A + A.T)
        sweeps += 1
        off = _off_norm(A)

    vals = np.diag(A).copy()
    order = np.argsort(vals, kind="stable")
    vals, V = vals[order], V[:, order]
    if n:
        lead = np.argmax(np.abs(V), axis=0)
        signs = np.where(V[lead, np.arange(n)] < 0, -1.0, 1.0)
        V = V * signs
    return EigenSystem(vals, V, sweeps, off)


def eigendecompose_symmetric(L) -> EigenSystem:
    return jacobi_eigh(L.L if isinstance(L, LaplacianMatrix) else L)


def embed(E: EigenSystem, k: int, row_normalize: bool) -> SpectralEmbedding:
    """Stack the k eigenvectors with the smallest eigenvalues as columns of U."""
    n = E.eigenvectors.shape[0]
    if not (1 <= k <= n):
        raise KOutOfRange(f"k must lie in [1, {n}], got {k}")
    U = E.eigenvectors[:, :k].copy()
    if row_normalize:
        norms = np.linalg.norm(U, axis=1)
        nz = norms > 0
        U[nz] /= norms[nz, None]
    return SpectralEmbedding(U, k, bool(row_normalize))


def default_row_normalize(variant: str) -> bool:
    return canonical_variant(variant) == SYMMETRIC
