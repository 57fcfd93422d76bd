"""Synthetic data sets with known structure, used by tests and the demo recipe."""
from __future__ import annotations

import csv
import io

import numpy as np

# Every coordinate separates the blobs. Axis-aligned centres would leave a
# pure-noise coordinate that per-column z-scoring inflates to unit variance.
BLOB_CENTERS = np.array([[0.0, 0.0, 0.0], [10.0, 2.0, 6.0], [4.0, 11.0, -3.0]])


def planted_blobs(per_blob: int = 27, sd: float = 0.1, centers=BLOB_CENTERS, seed: int = 0):
    """Gaussian blobs around ``centers``; returns (points, planted labels)."""
    centers = np.asarray(centers, dtype=float)
    rng = np.random.default_rng(seed)
    X = np.vstack([c + sd * rng.standard_normal((per_blob, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(len(centers)), per_blob)
    return X, y


def blobs_csv(X, prefix: str = "e") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity_id"] + [f"x{j}" for j in range(X.shape[1])])
    for i, row in enumerate(X):
        w.writerow([f"{prefix}{i:03d}", *(repr(float(v)) for v in row)])
    return buf.getvalue()


def synthetic_trade_table(n: int = 81, seed: int = 2023, rate: float = 23.1) -> str:
    """CSV text mimicking a right-skewed regional trade cross-section.

    Three tiers of entities with log-normal export and import values in
    thousand USD, a derived net export column and a per-entity rate column
    that fluctuates around ``rate``.
    """
    rng = np.random.default_rng(seed)
    tiers = rng.choice(3, size=n, p=[0.42, 0.33, 0.25])
    export_mu = np.array([8.0, 12.0, 15.5])[tiers]
    import_mu = np.array([7.5, 11.5, 15.8])[tiers]
    exports = np.round(np.exp(export_mu + 0.6 * rng.standard_normal(n)))
    imports = np.round(np.exp(import_mu + 0.6 * rng.standard_normal(n)))
    rates = rate * (1.0 + 0.05 * rng.standard_normal(n))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity_id", "export", "import", "net_export", "rate"])
    for i in range(n):
        w.writerow([f"region_{i + 1:02d}", int(exports[i]), int(imports[i]),
                    int(exports[i] - imports[i]), f"{rates[i]:.4f}"])
    return buf.getvalue()
