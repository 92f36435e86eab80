"""Base-versus-augmented model comparison over the eight metrics.

For every response and every metric this joins fixations to metric rows,
fits a base model (smooths of proportion and saliency plus random
intercepts for participant and position) and the same model augmented
with a smooth of the metric, and reports the AIC difference.  More
negative is better: the metric explained enough to beat its penalty
cost.  Both fits in a pair use exactly the same rows, so their AICs are
comparable; rows missing that metric are dropped for that pair only.
"""

import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

from .. import __version__ as _pkg_version
from ..errors import JoinFailure
from ..records import METRIC_COLUMNS
from .basis import SmoothTermSpec
from .fitting import DEFAULT_LAMBDA_GRID, FittedModel, ModelSpec, fit_model

RESPONSES = ("total_duration", "fixation_number")


@dataclass(frozen=True)
class EvaluationConfig:
    responses: tuple = RESPONSES
    metrics: tuple = METRIC_COLUMNS
    basis_size: int = 10
    lambda_grid: tuple = tuple(DEFAULT_LAMBDA_GRID)
    min_rows: int = 10

    def __post_init__(self):
        for response in self.responses:
            if response not in RESPONSES:
                raise ValueError(f"unknown response {response!r}; expected "
                                 f"one of {RESPONSES}")
        for metric in self.metrics:
            if metric not in METRIC_COLUMNS:
                raise ValueError(f"unknown metric {metric!r}")


@dataclass
class MetricComparison:
    metric: str
    rank: int
    delta_aic: float
    aic_full: float
    aic_base: float
    edf_full: float
    edf_base: float
    approx_f: float
    n_used: int
    n_dropped_nonpositive: int
    n_missing_metric: int
    warnings: tuple = ()


@dataclass
class ResponseSection:
    response: str
    n_rows: int
    base_aic: float
    base_edf: float
    base_refit_delta: float
    comparisons: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass
class ComparisonReport:
    provenance: dict
    n_metric_rows: int
    n_fixation_rows: int
    n_joined: int
    n_orphan_fixations: int
    n_unmatched_metric_rows: int
    sections: list = field(default_factory=list)
    curves: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = ["# metric evaluation report"]
        for key in sorted(self.provenance):
            lines.append(f"{key}: {self.provenance[key]}")
        lines.append(f"metric_rows: {self.n_metric_rows}")
        lines.append(f"fixation_rows: {self.n_fixation_rows}")
        lines.append(f"joined_rows: {self.n_joined}")
        lines.append(f"orphan_fixations: {self.n_orphan_fixations}")
        lines.append(f"unmatched_metric_rows: {self.n_unmatched_metric_rows}")
        for section in self.sections:
            lines.append("")
            lines.append(f"## response: {section.response}")
            lines.append(f"rows: {section.n_rows}")
            lines.append(f"base_aic: {section.base_aic:.6f}")
            lines.append(f"base_edf: {section.base_edf:.6f}")
            lines.append(f"base_refit_delta_aic: {section.base_refit_delta:g}")
            for message in section.warnings:
                lines.append(f"note: {message}")
            lines.append("rank  metric            delta_aic        aic_full         aic_base        "
                         "edf_full  edf_base  approx_f    n_used  n_dropped  n_missing")
            for row in section.comparisons:
                lines.append(
                    f"{row.rank:>4}  {row.metric:<16}  {row.delta_aic:>15.6f}  "
                    f"{row.aic_full:>15.6f}  {row.aic_base:>15.6f}  "
                    f"{row.edf_full:>8.4f}  {row.edf_base:>8.4f}  {row.approx_f:>8.4f}  "
                    f"{row.n_used:>8}  {row.n_dropped_nonpositive:>9}  {row.n_missing_metric:>9}")
        lines.append("")
        lines.append("delta_aic = aic(base + metric) - aic(base); more negative is better.")
        lines.append("approx_f is an approximate statistic on penalized fits, not an exact test.")
        return "\n".join(lines) + "\n"


def _joined_table(metric_rows, fixations):
    index = {}
    for row in metric_rows:
        key = (row.image_id, row.object_id)
        if key in index:
            raise JoinFailure(f"metric rows contain duplicate key {key!r}")
        index[key] = row
    table = {
        "total_duration": [], "fixation_number": [],
        "participant": [], "position": [],
        "proportion": [], "saliency": [],
    }
    for metric in METRIC_COLUMNS:
        table[metric] = []
    matched_keys = set()
    orphans = 0
    for record in fixations:
        key = (record.image_id, record.object_id)
        row = index.get(key)
        if row is None:
            orphans += 1
            continue
        matched_keys.add(key)
        table["total_duration"].append(record.total_duration_ms)
        table["fixation_number"].append(float(record.fixation_count))
        table["participant"].append(record.participant)
        table["position"].append(row.position)
        table["proportion"].append(row.proportion)
        table["saliency"].append(math.nan if row.saliency is None else row.saliency)
        for metric in METRIC_COLUMNS:
            value = getattr(row, metric)
            table[metric].append(math.nan if value is None else value)
    for key in ("total_duration", "fixation_number", "proportion", "saliency",
                *METRIC_COLUMNS):
        table[key] = np.asarray(table[key], dtype=np.float64)
    n_joined = len(table["participant"])
    unmatched = len(index) - len(matched_keys)
    return table, n_joined, orphans, unmatched


def _subset(table: dict, mask: np.ndarray) -> dict:
    out = {}
    for key, values in table.items():
        if isinstance(values, np.ndarray):
            out[key] = values[mask]
        else:
            out[key] = [v for v, keep in zip(values, mask) if keep]
    return out


def _approx_f(base, full) -> float:
    df_num = max(full.edf_total - base.edf_total, 1e-8)
    df_den = max(full.n_used - full.edf_total, 1e-8)
    if full.rss <= 0:
        return math.inf
    return ((base.rss - full.rss) / df_num) / (full.rss / df_den)


def evaluate_metrics(metric_rows, fixations, config: EvaluationConfig = EvaluationConfig()) -> ComparisonReport:
    """Join, fit, and rank; the full procedure behind the evaluate command.

    Raises JoinFailure when fewer than config.min_rows fixations find a
    metric row.  A saliency column that is missing everywhere drops the
    saliency smooth from every model with a note in the report.
    """
    table, n_joined, orphans, unmatched = _joined_table(metric_rows, fixations)
    if n_joined < config.min_rows:
        raise JoinFailure(f"only {n_joined} fixation rows joined to metric rows; "
                          f"need at least {config.min_rows}")

    grid = np.asarray(config.lambda_grid, dtype=np.float64)
    base_smooths = [SmoothTermSpec("proportion", basis_size=config.basis_size)]
    saliency_missing = not np.any(np.isfinite(table["saliency"]))
    saliency_note = None
    if saliency_missing:
        saliency_note = "saliency is missing for every joined row; s(saliency) omitted"
    else:
        base_smooths.append(SmoothTermSpec("saliency", basis_size=config.basis_size))

    base_covariates = ["proportion"] + ([] if saliency_missing else ["saliency"])

    report = ComparisonReport(
        provenance={
            "tool_version": _pkg_version,
            "aic_formula": "n*ln(rss/n) + 2*(edf+1)",
            "gcv_formula": "n*rss/(n-edf)^2",
            "lambda_grid": f"{grid.shape[0]} log-spaced in [{grid.min():g}, {grid.max():g}]",
            "basis_size": str(config.basis_size),
            "responses": ", ".join(config.responses),
            "metrics": ", ".join(config.metrics),
        },
        n_metric_rows=len(metric_rows),
        n_fixation_rows=len(fixations),
        n_joined=n_joined,
        n_orphan_fixations=orphans,
        n_unmatched_metric_rows=unmatched,
    )

    for response in config.responses:
        base_usable = np.isfinite(table[response])
        for covariate in base_covariates:
            base_usable &= np.isfinite(table[covariate])
        section = ResponseSection(response=response, n_rows=int(base_usable.sum()),
                                  base_aic=math.nan, base_edf=math.nan,
                                  base_refit_delta=math.nan)
        if saliency_note:
            section.warnings.append(saliency_note)

        base_spec = ModelSpec(response=response, smooth_terms=tuple(base_smooths),
                              random_intercepts=("participant", "position"))
        base_cache: dict = {}

        def fit_base(mask: np.ndarray) -> FittedModel:
            key = mask.tobytes()
            if key not in base_cache:
                base_cache[key] = fit_model(base_spec, _subset(table, mask),
                                            lambda_grid=grid, min_rows=config.min_rows)
            return base_cache[key]

        whole_base = fit_base(base_usable)
        fresh_base = fit_model(base_spec, _subset(table, base_usable),
                               lambda_grid=grid, min_rows=config.min_rows)
        section.base_aic = whole_base.result.aic
        section.base_edf = whole_base.result.edf_total
        section.base_refit_delta = fresh_base.result.aic - whole_base.result.aic

        for metric in config.metrics:
            mask = base_usable & np.isfinite(table[metric])
            n_missing = int(base_usable.sum() - mask.sum())
            base_fit = fit_base(mask)
            full_spec = ModelSpec(
                response=response,
                smooth_terms=tuple(base_smooths) + (
                    SmoothTermSpec(metric, basis_size=config.basis_size),),
                random_intercepts=("participant", "position"),
            )
            full_fit = fit_model(full_spec, _subset(table, mask),
                                 lambda_grid=grid, min_rows=config.min_rows)
            section.comparisons.append(MetricComparison(
                metric=metric, rank=0,
                delta_aic=full_fit.result.aic - base_fit.result.aic,
                aic_full=full_fit.result.aic, aic_base=base_fit.result.aic,
                edf_full=full_fit.result.edf_total, edf_base=base_fit.result.edf_total,
                approx_f=_approx_f(base_fit.result, full_fit.result),
                n_used=full_fit.result.n_used,
                n_dropped_nonpositive=full_fit.result.n_dropped,
                n_missing_metric=n_missing,
                warnings=full_fit.result.warnings,
            ))
            curve_terms = []
            for name in full_fit.term_names():
                if name.startswith("s("):
                    xs, ys = full_fit.partial_effect(name)
                    curve_terms.append((name, xs, ys))
            report.curves[(response, metric)] = curve_terms

        section.comparisons.sort(key=lambda row: (row.delta_aic, row.metric))
        for position, row in enumerate(section.comparisons, start=1):
            row.rank = position
        for row in section.comparisons:
            for message in row.warnings:
                note = f"{row.metric}: {message}"
                if note not in section.warnings:
                    section.warnings.append(note)
        report.sections.append(section)
    return report


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "_", text).strip("_")


def write_effect_csvs(report: ComparisonReport, directory: str) -> list:
    """One CSV per (response, metric, smooth term): covariate_value,effect.

    Returns the written paths in deterministic order.
    """
    from ..bundleio import _write_text_atomic
    os.makedirs(directory, exist_ok=True)
    written = []
    for (response, metric) in sorted(report.curves):
        for name, xs, ys in report.curves[(response, metric)]:
            filename = f"{_safe_name(response)}__{_safe_name(metric)}__{_safe_name(name)}.csv"
            path = os.path.join(directory, filename)
            lines = ["covariate_value,effect"]
            for x, y in zip(xs, ys):
                lines.append(f"{format(x, '.17g')},{format(y, '.17g')}")
            _write_text_atomic(path, "\n".join(lines) + "\n")
            written.append(path)
    return written
