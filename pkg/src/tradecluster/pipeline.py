"""End-to-end run: load, prepare, embed, cluster, select and label."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .affinity import SimilarityMatrix, gaussian_similarity, knn_sparsify, median_heuristic_sigma
from .dataset import (
    DescriptiveStats,
    FeatureMatrix,
    IndicatorTable,
    adjust_for_rate,
    describe_table,
    impute_missing,
    load_csv,
    standardize,
)
from .errors import KOutOfRange, TooFewRows
from .kmeans import DEFAULT_MAX_ITER, DEFAULT_RESTARTS, DEFAULT_TOL, ClusteringResult
from .report import (
    CategoryAssignment,
    ShareSummary,
    category_shares,
    default_category_names,
    label_categories,
)
from .selection import (
    EMBEDDING,
    SelectionReport,
    SweepConfig,
    cluster_embedding,
    eigen_gaps,
    optimal_k_eigengap,
    silhouette,
    sweep_k,
)
from .spectral import SYMMETRIC, EigenSystem, canonical_variant, eigendecompose_symmetric, laplacian

log = logging.getLogger(__name__)

DEFAULT_K_MAX = 10


@dataclass(frozen=True)
class PipelineConfig:
    input: str | None = None
    columns: tuple[str, ...] = ()
    adjust_rate: float | str | None = None
    sigma: float | None = None
    knn: int | None = None
    laplacian: str = SYMMETRIC
    row_normalize: bool | None = None
    k: int | None = None
    k_range: tuple[int, int] | None = None
    seed: int = 0
    restarts: int = DEFAULT_RESTARTS
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL
    silhouette_space: str = EMBEDDING
    reference: str | None = None
    categories: tuple[str, ...] | None = None
    unit: str = ""

    def sweep_config(self) -> SweepConfig:
        return SweepConfig(
            variant=self.laplacian,
            row_normalize=self.row_normalize,
            seed=self.seed,
            restarts=self.restarts,
            max_iter=self.max_iter,
            tol=self.tol,
            silhouette_space=self.silhouette_space,
        )


@dataclass
class RunResult:
    config: PipelineConfig
    table: IndicatorTable
    indicator_columns: list[str]
    imputed: dict[str, int]
    stats: dict[str, DescriptiveStats]
    features: FeatureMatrix
    similarity: SimilarityMatrix
    eigensystem: EigenSystem
    selection: SelectionReport
    k: int
    clustering: ClusteringResult
    silhouette: float | None
    assignment: CategoryAssignment
    shares: ShareSummary
    k_range: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict)

    def config_echo(self) -> dict:
        c = self.config
        sweep = c.sweep_config()
        return {
            "input": c.input,
            "columns": list(self.features.feature_names),
            "reference": self.reference_column,
            "adjust_rate": c.adjust_rate,
            "sigma_mode": "auto" if c.sigma is None else "fixed",
            "sigma": self.similarity.sigma,
            "knn": c.knn,
            "laplacian": canonical_variant(c.laplacian),
            "row_normalize": sweep.resolved_row_normalize(),
            "k_mode": "auto" if c.k is None else "fixed",
            "k_range": list(self.k_range) if self.k_range else None,
            "seed": c.seed,
            "restarts": c.restarts,
            "max_iter": c.max_iter,
            "tol": c.tol,
            "silhouette_space": c.silhouette_space,
            "categories": list(self.assignment.names),
            "standardization": "z-score (population sd); constant columns -> 0",
            "imputation": "column median",
        }

    @property
    def reference_column(self) -> str:
        return self.config.reference or self.indicator_columns[0]


def resolve_k_range(config: PipelineConfig, n: int) -> tuple[int, int] | None:
    if config.k_range is not None:
        return tuple(config.k_range)
    if n < 3:
        return None
    return (2, min(DEFAULT_K_MAX, n - 1))


def prepare_table(config: PipelineConfig, table: IndicatorTable | None = None) -> IndicatorTable:
    if table is not None:
        return table
    wanted = list(config.columns)
    for extra in (config.reference, config.adjust_rate if isinstance(config.adjust_rate, str) else None):
        if extra and extra not in wanted:
            wanted.append(extra)
    return load_csv(config.input, wanted or None, units=config.unit)


def run_pipeline(config: PipelineConfig, table: IndicatorTable | None = None) -> RunResult:
    """Run every stage for ``config``; ``table`` bypasses CSV loading."""
    table = prepare_table(config, table)
    columns = list(config.columns) or [
        c for c in table.column_names if c != config.adjust_rate and c != config.reference
    ]
    reference = config.reference or columns[0]
    if table.n < 2:
        raise TooFewRows(f"need at least 2 entities, got {table.n}")

    imputed = impute_missing(table)
    table = imputed.table
    log.info("imputed %d missing cells", imputed.count)
    if config.adjust_rate is not None:
        keep = sorted(set(columns) | {reference})
        table = adjust_for_rate(table, config.adjust_rate, [c for c in keep if c != config.adjust_rate])

    stats = describe_table(table.select(sorted(set(columns) | {reference}, key=table.column_names.index)))
    features = standardize(table, columns)

    sigma = config.sigma if config.sigma is not None else median_heuristic_sigma(features)
    sim = gaussian_similarity(features, sigma)
    if config.knn is not None:
        sim = knn_sparsify(sim, config.knn)
    log.info("sigma=%.6g knn=%s", sim.sigma, config.knn)

    sweep_cfg = config.sweep_config()
    eig = eigendecompose_symmetric(laplacian(sim, config.laplacian))
    k_range = resolve_k_range(config, table.n)
    if k_range is not None:
        selection = sweep_k(sim, k_range, sweep_cfg, features=features, eigensystem=eig)
    else:
        gaps = eigen_gaps(eig.eigenvalues)
        selection = SelectionReport(
            eigenvalues=eig.eigenvalues, gaps=gaps,
            chosen_k=optimal_k_eigengap(gaps, 1, gaps.size),
            k_range=(1, gaps.size), silhouette_by_k={},
            silhouette_space=config.silhouette_space,
            variant=canonical_variant(config.laplacian),
        )

    k = config.k if config.k is not None else selection.chosen_k
    if not (1 <= k <= table.n):
        raise KOutOfRange(f"k must lie in [1, {table.n}], got {k}")
    if k in selection.clusterings:
        clustering = selection.clusterings[k]
        U = None
    else:
        U, clustering = cluster_embedding(eig, k, sweep_cfg)

    score = None
    if k >= 2:
        if k in selection.silhouette_by_k:
            score = selection.silhouette_by_k[k]
        else:
            space = U.U if config.silhouette_space == EMBEDDING else features.X
            score = silhouette(space, clustering.labels)[1]

    names = list(config.categories) if config.categories else default_category_names(k)
    assignment = label_categories(clustering.labels, table.column(reference).values, names, table.entity_ids)
    shares = category_shares(assignment)
    log.info("k=%d silhouette=%s shares=%s", k, score, shares.percents())

    return RunResult(
        config=config,
        table=table,
        indicator_columns=sorted(set(columns) | {reference}, key=table.column_names.index),
        imputed=imputed.per_column,
        stats=stats,
        features=features,
        similarity=sim,
        eigensystem=eig,
        selection=selection,
        k=k,
        clustering=clustering,
        silhouette=score,
        assignment=assignment,
        shares=shares,
        k_range=k_range,
    )
