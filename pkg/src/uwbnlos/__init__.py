"""NLoS identification for UWB ranging by Gaussian / generalized Gaussian anomaly detection."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .classifiers import (
    AnomalyModel,
    NbModel,
    anomaly_score,
    classify_anomaly,
    fit_anomaly,
    fit_nb,
    nb_classify,
    nb_posterior,
    select_epsilon,
)
from .distributions import (
    GaussianParams,
    GgdParams,
    MomentEstimates,
    alpha_from_variance,
    estimate_moments,
    fit_gd,
    fit_ggd,
    gd_pdf,
    ggd_log_pdf,
    ggd_pdf,
    invert_kurtosis,
    log_gamma,
    moments_from_params,
    sample_ggd,
)
from .errors import (
    ArgumentError,
    DegenerateFitError,
    DetectionError,
    DomainError,
    FormatError,
    ModelStateError,
    ParseError,
    UwbError,
)
from .evaluation import ExperimentConfig, confusion_matrix, metrics, run_experiment, split_dataset
from .features import (
    distance_error,
    extract_features,
    first_path_power,
    power_difference,
    rolling_range_variance,
    rx_power,
)
from .model import ClassLabel, Dataset, FeatureVector, RangingSample, UwbConfig, validate_dataset
from .simulator import ScenarioSpec, synthesize_dataset

__version__ = "0.1.0"
