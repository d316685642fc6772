"""Quadratic manifold sparse regression.

Train quadratic manifolds from snapshot data with a sparse greedy method and
reconstruct full states from a handful of sampled components. Linear
gappy-POD/QDEIM reconstruction and full-data quadratic-manifold encoding are
included as baselines.
"""

from qmsr._core import (
    GaussNewtonConfig,
    GaussNewtonDiagnostics,
    GaussNewtonTrace,
    IoError,
    Model,
    ModelValidationError,
    RankDeficientError,
    SamplingOperator,
    TrainingMethod,
    ValidationError,
    apply_sampling,
    gen_acoustic,
    gen_advection_pulse,
    gen_vlasov,
    pivoted_qr_column_order,
    qdeim_select,
    quad_features,
    quad_features_jacobian,
    quad_features_matrix,
    read_csv_matrix,
    read_matrix,
    read_model,
    reduced_svd,
    relative_error,
    split_even_odd,
    train_gappy_pod,
    train_qm_full,
    train_qmsr,
    write_csv_matrix,
    write_matrix,
    write_model,
)

__all__ = [
    "GaussNewtonConfig",
    "GaussNewtonDiagnostics",
    "GaussNewtonTrace",
    "IoError",
    "Model",
    "ModelValidationError",
    "RankDeficientError",
    "SamplingOperator",
    "TrainingMethod",
    "ValidationError",
    "apply_sampling",
    "gen_acoustic",
    "gen_advection_pulse",
    "gen_vlasov",
    "pivoted_qr_column_order",
    "qdeim_select",
    "quad_features",
    "quad_features_jacobian",
    "quad_features_matrix",
    "read_csv_matrix",
    "read_matrix",
    "read_model",
    "reduced_svd",
    "relative_error",
    "split_even_odd",
    "train_gappy_pod",
    "train_qm_full",
    "train_qmsr",
    "write_csv_matrix",
    "write_matrix",
    "write_model",
]

__version__ = "0.1.0"
