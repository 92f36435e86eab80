"""Penalized additive models: spline bases, GCV fitting, comparison, simulation."""

from .basis import BSplineBasis, SmoothTermSpec, bspline_basis
from .compare import (
    ComparisonReport,
    EvaluationConfig,
    MetricComparison,
    ResponseSection,
    evaluate_metrics,
    write_effect_csvs,
)
from .fitting import (
    DEFAULT_LAMBDA_GRID,
    FitResult,
    FittedModel,
    ModelSpec,
    fit_model,
    fit_penalized,
    select_lambdas,
)
from .simulate import SimConfig, SplitMix64, g_driver, simulate_benchmark

__all__ = [
    "BSplineBasis", "SmoothTermSpec", "bspline_basis",
    "ComparisonReport", "EvaluationConfig", "MetricComparison", "ResponseSection",
    "evaluate_metrics", "write_effect_csvs",
    "DEFAULT_LAMBDA_GRID", "FitResult", "FittedModel", "ModelSpec",
    "fit_model", "fit_penalized", "select_lambdas",
    "SimConfig", "SplitMix64", "g_driver", "simulate_benchmark",
]
