"""Performance categories, share summaries and on-disk outputs."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import plots
from .dataset import descriptive_csv
from .errors import CountMismatch, EmptyAssignment, IoError

SCHEMA_VERSION = 1


def default_category_names(k: int) -> list[str]:
    if k == 1:
        return ["All"]
    if k == 2:
        return ["Low", "High"]
    if k == 3:
        return ["Low", "Medium", "High"]
    return ["Low", *(f"Medium-{i}" for i in range(1, k - 1)), "High"]


@dataclass(frozen=True)
class CategoryAssignment:
    """Per-entity cluster label and category, plus the cluster ranking used."""

    entity_ids: tuple[str, ...]
    labels: np.ndarray
    categories: tuple[str, ...]
    reference: np.ndarray
    names: tuple[str, ...]
    ranked_clusters: tuple[int, ...]
    cluster_means: tuple[float, ...]

    def category_of_cluster(self) -> dict[int, str]:
        return dict(zip(self.ranked_clusters, self.names))


@dataclass(frozen=True)
class CategoryShare:
    category: str
    cluster: int
    count: int
    percent: int
    reference_mean: float


@dataclass(frozen=True)
class ShareSummary:
    shares: tuple[CategoryShare, ...]
    total_entities: int

    def percents(self) -> tuple[int, ...]:
        return tuple(s.percent for s in self.shares)

    def counts(self) -> tuple[int, ...]:
        return tuple(s.count for s in self.shares)


def label_categories(labels, reference, names: Sequence[str], entity_ids: Sequence[str] | None = None) -> CategoryAssignment:
    """Rank clusters by the mean reference value; rank r receives ``names[r]``.

    Equal means are ordered by the smaller cluster label.
    """
    labels = np.asarray(labels)
    reference = np.asarray(reference, dtype=float)
    if labels.shape != reference.shape:
        raise ValueError("labels and reference must have the same length")
    clusters = np.unique(labels)
    if clusters.size != len(names):
        raise CountMismatch(f"{clusters.size} clusters but {len(names)} category names")
    means = [float(reference[labels == c].mean()) for c in clusters]
    ranked = sorted(zip(means, clusters.tolist()))
    order = tuple(c for _, c in ranked)
    lookup = dict(zip(order, names))
    if entity_ids is None:
        entity_ids = [str(i) for i in range(labels.size)]
    return CategoryAssignment(
        entity_ids=tuple(entity_ids),
        labels=labels,
        categories=tuple(lookup[c] for c in labels.tolist()),
        reference=reference,
        names=tuple(names),
        ranked_clusters=order,
        cluster_means=tuple(m for m, _ in ranked),
    )


def round_percent(count: int, total: int) -> int:
    """round(100 * count / total), halves away from zero, in exact integer arithmetic."""
    return (200 * count + total) // (2 * total)


def category_shares(assignment: CategoryAssignment) -> ShareSummary:
    total = len(assignment.labels)
    if total == 0:
        raise EmptyAssignment("no entities to summarise")
    counts = {c: 0 for c in assignment.ranked_clusters}
    for c in assignment.labels.tolist():
        counts[c] += 1
    shares = tuple(
        CategoryShare(name, int(c), counts[c], round_percent(counts[c], total), mean)
        for name, c, mean in zip(assignment.names, assignment.ranked_clusters, assignment.cluster_means)
    )
    return ShareSummary(shares, total)


def shares_from_counts(counts: Sequence[int], names: Sequence[str] | None = None) -> ShareSummary:
    """Share summary for category sizes given directly, in rank order."""
    names = list(names) if names is not None else default_category_names(len(counts))
    labels = np.repeat(np.arange(len(counts)), counts)
    ref = labels.astype(float)
    return category_shares(label_categories(labels, ref, names))


# --- output files ---------------------------------------------------------

def atomic_write(path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc


def ensure_dir(path) -> Path:
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(path, exc.strerror or str(exc)) from exc
    if not os.access(path, os.W_OK):
        raise IoError(path, "directory is not writable")
    return path


def _num(v: float) -> str:
    return repr(float(v))


def entities_csv(run) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = run.indicator_columns
    w.writerow(["entity_id", *cols, "cluster", "category"])
    a = run.assignment
    values = run.table.matrix(cols)
    for i, eid in enumerate(a.entity_ids):
        w.writerow([eid, *(_num(v) for v in values[i]), int(a.labels[i]), a.categories[i]])
    return buf.getvalue()


def summary_dict(run) -> dict:
    shares = run.shares
    out = {
        "schema": SCHEMA_VERSION,
        "config": run.config_echo(),
        "n_entities": run.table.n,
        "imputed_cells": dict(run.imputed),
        "descriptive_stats": {
            name: {"mean": st.mean, "median": st.median, "sd": st.sd, "min": st.min, "max": st.max}
            for name, st in run.stats.items()
        },
        "selection": run.selection.to_dict(),
        "k_used": run.k,
        "clustering": {
            "inertia": run.clustering.inertia,
            "iterations": run.clustering.iterations,
            "best_restart": run.clustering.best_restart,
            "restarts_used": run.clustering.restarts_used,
            "seed": run.clustering.seed,
            "silhouette": run.silhouette,
        },
        "shares": {
            "total_entities": shares.total_entities,
            "categories": [
                {"category": s.category, "cluster": s.cluster, "count": s.count,
                 "percent": s.percent, "reference_mean": s.reference_mean}
                for s in shares.shares
            ],
        },
    }
    return out


def summary_json(run) -> str:
    return json.dumps(summary_dict(run), indent=2, sort_keys=True, ensure_ascii=False, allow_nan=False) + "\n"


def emit_report(run, path) -> list[Path]:
    """Write entities.csv, summary.json and descriptive_stats.csv into ``path``."""
    out = ensure_dir(path)
    files = {
        "entities.csv": entities_csv(run),
        "summary.json": summary_json(run),
        "descriptive_stats.csv": descriptive_csv(run.stats),
    }
    written = []
    for name, text in files.items():
        atomic_write(out / name, text)
        written.append(out / name)
    return written


def emit_plots(run, path) -> list[Path]:
    """Eigenvalue scree, eigen-gap bars and silhouette-vs-k line as SVG files."""
    out = ensure_dir(path)
    sel = run.selection
    lam = list(sel.eigenvalues)
    gaps = list(sel.gaps)
    ks = sorted(sel.silhouette_by_k)
    charts = {
        "eigenvalues.svg": plots.line_chart(
            range(1, len(lam) + 1), lam, "Eigenvalues (ascending)", "index", "eigenvalue",
            mark_k=sel.chosen_k),
        "eigengaps.svg": plots.bar_chart(
            range(1, len(gaps) + 1), gaps, "Eigen-gaps", "index i", "gap to next eigenvalue",
            mark_k=sel.chosen_k),
        "silhouette.svg": plots.line_chart(
            ks, [sel.silhouette_by_k[k] for k in ks], "Mean silhouette by cluster count",
            "number of clusters", "mean silhouette",
            mark_k=run.k if run.k in sel.silhouette_by_k else None),
    }
    written = []
    for name, svg in charts.items():
        atomic_write(out / name, svg)
        written.append(out / name)
    return written


def matrix_csv(ids: Sequence[str], M: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entity_id", *ids])
    for eid, row in zip(ids, M):
        w.writerow([eid, *(_num(v) for v in row)])
    return buf.getvalue()


def eigenvalues_csv(eigenvalues) -> str:
    lines = ["index,eigenvalue"]
    lines += [f"{i},{_num(v)}" for i, v in enumerate(eigenvalues, start=1)]
    return "\n".join(lines) + "\n"


def emit_matrices(run, path) -> list[Path]:
    out = ensure_dir(path)
    sim = out / "similarity.csv"
    eig = out / "eigenvalues.csv"
    atomic_write(sim, matrix_csv(run.table.entity_ids, run.similarity.S))
    atomic_write(eig, eigenvalues_csv(run.selection.eigenvalues))
    return [sim, eig]
