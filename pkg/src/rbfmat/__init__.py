"""Matrices approximated as an offset plus weighted RBF components.

The decomposition writes entry (i, j) as

    offset + sum_k weights[k] * exp(-(row_coords[k, i] - col_coords[k, j])**2)

and is fitted to a target matrix by adaptive gradient descent with batched
random restarts (:func:`fit`), then compared against truncated SVD at
matched parameter budgets (:mod:`rbfmat.svd`, :mod:`rbfmat.experiments`).
"""

from .analysis import (RocCurve, cluster_1d, community_accuracy,
                       edge_prediction_roc, image_to_matrix, matrix_to_image,
                       pearson_correlation)
from .datagen import (PointCloud, barabasi_albert, distance_from_gram,
                      erdos_renyi, gaussian_matrix, k_exact2, s_curve, sbm,
                      smoothed_gaussian_vector, soft_distance_matrix)
from .lossgrad import (GradientSet, gradient, gradient_subset, mse_loss,
                       mse_loss_subset)
from .matio import (load_matrix, load_matrix_bin, load_matrix_csv,
                    load_model_csv, load_points_csv, load_roc_csv,
                    load_svd_csv, matrix_checksum, matrix_to_bytes,
                    save_matrix_bin, save_matrix_csv, save_model_csv,
                    save_points_csv, save_roc_csv, save_svd_csv)
from .model import (IndexSample, RbfModel, as_matrix, evaluate_entries,
                    evaluate_full, param_count, rbf_component, rbf_entry,
                    vector_param_count)
from .optimize import (AdagradOptimizer, AdamOptimizer, AllRunsDivergedError,
                       FitConfig, FitReport, apply_gradient_step, fit,
                       init_model, make_optimizer, sample_minibatch)
from .pgm import read_image, write_pgm
from .svd import (SvdApprox, reconstruct, svd_mse_curve, svd_param_count,
                  svd_vector_param_count, symmetric_lowrank, truncated_svd)

__version__ = "0.1.0"

__all__ = [
    "AdagradOptimizer",
    "AdamOptimizer",
    "AllRunsDivergedError",
    "FitConfig",
    "FitReport",
    "GradientSet",
    "IndexSample",
    "PointCloud",
    "RbfModel",
    "RocCurve",
    "SvdApprox",
    "apply_gradient_step",
    "as_matrix",
    "barabasi_albert",
    "cluster_1d",
    "community_accuracy",
    "distance_from_gram",
    "edge_prediction_roc",
    "erdos_renyi",
    "evaluate_entries",
    "evaluate_full",
    "fit",
    "gaussian_matrix",
    "gradient",
    "gradient_subset",
    "image_to_matrix",
    "init_model",
    "k_exact2",
    "load_matrix",
    "load_matrix_bin",
    "load_matrix_csv",
    "load_model_csv",
    "load_points_csv",
    "load_roc_csv",
    "load_svd_csv",
    "make_optimizer",
    "matrix_checksum",
    "matrix_to_bytes",
    "matrix_to_image",
    "mse_loss",
    "mse_loss_subset",
    "param_count",
    "pearson_correlation",
    "rbf_component",
    "rbf_entry",
    "read_image",
    "reconstruct",
    "s_curve",
    "sample_minibatch",
    "save_matrix_bin",
    "save_matrix_csv",
    "save_model_csv",
    "save_points_csv",
    "save_roc_csv",
    "save_svd_csv",
    "sbm",
    "smoothed_gaussian_vector",
    "soft_distance_matrix",
    "svd_mse_curve",
    "svd_param_count",
    "svd_vector_param_count",
    "symmetric_lowrank",
    "truncated_svd",
    "vector_param_count",
    "write_pgm",
]
