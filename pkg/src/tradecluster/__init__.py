"""Spectral clustering of entities described by tabular economic indicators."""

from .affinity import SimilarityMatrix, gaussian_similarity, knn_sparsify, median_heuristic_sigma
from .dataset import (
    DescriptiveStats,
    FeatureMatrix,
    IndicatorTable,
    adjust_for_rate,
    describe,
    impute_missing,
    load_csv,
    standardize,
)
from .kmeans import ClusteringResult, kmeans, kmeanspp_init
from .pipeline import PipelineConfig, RunResult, run_pipeline
from .report import category_shares, emit_plots, emit_report, label_categories
from .selection import SelectionReport, eigen_gaps, optimal_k_eigengap, silhouette, sweep_k
from .spectral import EigenSystem, LaplacianMatrix, SpectralEmbedding, degree_matrix, eigendecompose_symmetric, embed, laplacian

__version__ = "0.1.0"
