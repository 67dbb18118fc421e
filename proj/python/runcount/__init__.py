"""Adaptive estimation of how many runs a stochastic optimizer needs."""

from ._core import (
    AccuracyRow,
    BootstrapResult,
    BudgetSpec,
    ConfidenceInterval,
    DEConfig,
    DEStrategy,
    EstimatorConfig,
    Estimator,
    EstimatorPhase,
    EvaluationRecord,
    OutlierMethod,
    OutlierReport,
    ProblemId,
    ProblemInstance,
    RunCountEstimate,
    RunResult,
    RuncountError,
    SavingsReport,
    SymmetryAssessment,
    Termination,
    Triplet,
    VerdictBand,
    aggregate_accuracy,
    assess,
    bca_ci,
    bootstrap_mean_diff_ci,
    canonical_instance,
    de_run,
    detect_outliers,
    estimate_from_prefixes,
    evaluate_prefix,
    evaluate_triplet,
    make_instance,
    mean,
    median,
    normal_quantile,
    parse_outlier_method,
    parse_problem_id,
    post_hoc_band,
    quantile,
    run_benchmark,
    sample_config_space,
    savings_report,
    skewness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
