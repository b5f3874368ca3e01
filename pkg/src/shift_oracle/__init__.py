"""Accuracy estimation for classifiers on unlabeled, distribution-shifted data."""

from .calibration import TemperatureModel, apply_temperature, fit_temperature
from .data import (
    PredictionSet,
    ScoreKind,
    ScoreVector,
    correctness,
    error_rate,
    score,
    softmax_rows,
)
from .errors import (
    DegenerateInput,
    EmptyGroup,
    FormatError,
    InvalidInput,
    MissingLabels,
    OutOfTheoremScope,
    ShiftOracleError,
    Unconverged,
)
from .estimators import (
    AtcModel,
    BinTable,
    Estimate,
    ac_estimate,
    atc_estimate,
    build_bin_table,
    doc_estimate,
    fit_atc,
    gde_estimate,
    im_estimate,
    im_estimate_from_scores,
    scan_threshold,
)
from .evaluation import EstimateReport, LinearFit, ReportEntry, apply_fit, mae, siegel_fit
from .shift import (
    Example1Result,
    GaussianMixtureSpec,
    ImportanceWeights,
    covariate_shift_error,
    estimate_label_shift_weights,
    example1_errors,
    label_shift_error,
    mlls_fixed_point,
)
from .toy import (
    LinearSigmoidClassifier,
    Role,
    ToyConfig,
    ToySample,
    minority_margin,
    run_biased_support_experiment,
    run_consistency_experiment,
    sample_toy,
    toy_predict,
    toy_true_accuracy,
)

__version__ = "0.1.0"
