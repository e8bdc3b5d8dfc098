"""Relative-error scoring and the repeated-run benchmark protocol.

A framework's accuracy on a holdout window is the mean relative error
|y - yhat| / y over the holdout points; robustness is the spread of that
mean over repeated seeded runs (population standard deviation).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .core import TimeSeries
from .pipeline import VARIANTS, FrameworkSpec, run_framework

_VARIANT_PREFIX = {
    "NN": "",
    "EMD_NN": "EMD+",
    "EMD_DTW_NN": "EMD+DTW+",
    "EEMD_DTW_NN": "EEMD+DTW+",
}


def framework_label(spec: FrameworkSpec) -> str:
    """Human-readable row label, e.g. ``EMD+DTW+BPNN``."""
    return _VARIANT_PREFIX[spec.variant] + spec.predictor.kind


def relative_error(actual: float, predicted: float) -> float:
    """|y - yhat| / y for positive actuals; negative actuals fall back to
    |y| in the denominator. Undefined (raises) for actual = 0."""
    if actual == 0:
        raise ValueError("relative error is undefined for actual = 0")
    return abs(actual - predicted) / abs(actual)


@dataclass(frozen=True)
class RunEvaluation:
    """Pointwise relative errors for one run plus their mean."""

    per_point_re: tuple
    mean_re: float
    used_abs_denominator: bool = False


def evaluate_run(actuals: TimeSeries, predictions) -> RunEvaluation:
    """Elementwise relative errors of one prediction run and their mean.

    Lengths must match and no actual may be zero; negative actuals are
    scored against their magnitude and flagged.
    """
    predictions = np.asarray(predictions, dtype=np.float64)
    if predictions.size != len(actuals):
        raise ValueError(
            f"length mismatch: {len(actuals)} actuals vs {predictions.size} predictions"
        )
    res = tuple(
        relative_error(float(a), float(p))
        for a, p in zip(actuals.values, predictions)
    )
    return RunEvaluation(
        per_point_re=res,
        mean_re=float(np.mean(res)),
        used_abs_denominator=bool(np.any(actuals.values < 0)),
    )


@dataclass(frozen=True)
class EvalReport:
    """Aggregated accuracy of one framework over repeated runs.

    ``per_point`` holds (actual, mean prediction over runs, RE of that
    mean); ``re_mean_over_runs``/``re_std_over_runs`` aggregate the per-run
    mean REs (population std), matching the mean +/- std presentation.
    """

    label: str
    per_point: tuple
    per_point_std: tuple
    mean_re: float
    runs: int
    re_mean_over_runs: float
    re_std_over_runs: float
    per_run_mean_re: tuple
    per_run_predictions: tuple

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.re_std_over_runs < 0 or any(re < 0 for _, _, re in self.per_point):
            raise ValueError("relative errors cannot be negative")

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "per_point": [list(p) for p in self.per_point],
            "per_point_std": list(self.per_point_std),
            "mean_re": self.mean_re,
            "runs": self.runs,
            "re_mean_over_runs": self.re_mean_over_runs,
            "re_std_over_runs": self.re_std_over_runs,
            "per_run_mean_re": list(self.per_run_mean_re),
            "per_run_predictions": [list(p) for p in self.per_run_predictions],
        }


def aggregate_runs(label: str, actuals: TimeSeries, run_predictions) -> EvalReport:
    """Fold per-run predictions into one report."""
    stacked = np.stack([np.asarray(p, dtype=np.float64) for p in run_predictions])
    runs = stacked.shape[0]
    mean_pred = stacked.mean(axis=0)
    std_pred = stacked.std(axis=0)
    mean_eval = evaluate_run(actuals, mean_pred)
    per_run_means = tuple(
        evaluate_run(actuals, stacked[r]).mean_re for r in range(runs)
    )
    return EvalReport(
        label=label,
        per_point=tuple(
            (float(a), float(p), re)
            for a, p, re in zip(actuals.values, mean_pred, mean_eval.per_point_re)
        ),
        per_point_std=tuple(float(s) for s in std_pred),
        mean_re=mean_eval.mean_re,
        runs=runs,
        re_mean_over_runs=float(np.mean(per_run_means)),
        re_std_over_runs=float(np.std(per_run_means)),
        per_run_mean_re=per_run_means,
        per_run_predictions=tuple(tuple(float(v) for v in row) for row in stacked),
    )


def benchmark(series: TimeSeries, holdout: int, specs: Sequence[FrameworkSpec],
              runs: int, seeds: Sequence[int], labels: Optional[Sequence[str]] = None,
              workers: int = 1) -> list:
    """Compare frameworks on a holdout window over repeated seeded runs.

    Each framework trains on ``series[:holdout]`` and forecasts the rest;
    run r uses ``seeds[r]`` as its root seed for every framework, so
    configuration-identical specs produce identical reports. Reports come
    back ordered by framework family (NN, EMD+NN, EMD+DTW+NN, EEMD+DTW+NN).

    Parameters
    ----------
    series : TimeSeries
        Full series including the holdout window.
    holdout : int
        Split point; must leave at least twice the segment length of every
        spec for training, and at least one point to forecast.
    specs : sequence of FrameworkSpec
        Frameworks to compare (horizon is overridden by the holdout size).
    runs : int
        Repetitions per framework.
    seeds : sequence of int
        One root seed per run; ``len(seeds) == runs``.
    """
    if len(seeds) != runs:
        raise ValueError(f"need {runs} seeds, got {len(seeds)}")
    horizon = len(series) - holdout
    if horizon < 1:
        raise ValueError("holdout leaves nothing to forecast")
    for spec in specs:
        if holdout < 2 * spec.grouping.segment_length:
            raise ValueError(
                f"holdout {holdout} leaves fewer than 2 x segment_length "
                f"({2 * spec.grouping.segment_length}) training points"
            )

    train_labels = series.labels[:holdout] if series.labels else None
    train_series = TimeSeries(series.values[:holdout], train_labels)
    actual_labels = series.labels[holdout:] if series.labels else None
    actuals = TimeSeries(series.values[holdout:], actual_labels)

    if labels is None:
        labels = [framework_label(spec) for spec in specs]

    order = sorted(range(len(specs)), key=lambda i: VARIANTS.index(specs[i].variant))
    reports = []
    for i in order:
        spec = replace(specs[i], horizon=horizon)
        predictions = [
            run_framework(train_series, spec, seed=seeds[r], workers=workers).combined
            for r in range(runs)
        ]
        reports.append(aggregate_runs(labels[i], actuals, predictions))
    return reports
