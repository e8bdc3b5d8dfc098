"""Framework orchestration: decompose, forecast each component, recombine.

Four variants share one entry point. ``nn`` regresses on the raw series;
``emd_nn`` forecasts every decomposition component directly;
``emd_dtw_nn`` and ``eemd_dtw_nn`` split components into fast and slow,
forecast the fast ones from DTW-similarity-grouped training sets, and the
slow ones from plain sliding windows. The combined forecast is always the
exact ordered sum of the per-component forecasts.

All randomness derives from one root seed via per-(component, step) keys,
so parallel and serial execution, and reruns, agree bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .core import (
    Decomposition,
    FrequencySplit,
    TimeSeries,
    derive_seed,
    minmax_normalize,
)
from .decomposition import EemdConfig, SiftConfig, count_zero_crossings, emd, eemd
from .grouping import (
    GroupingConfig,
    build_training_set,
    rank_by_similarity,
    segmentize,
    select_group,
    sliding_window_set,
)
from .predictors import ForecastSession, PredictorConfig, predict, train

VARIANTS = ("NN", "EMD_NN", "EMD_DTW_NN", "EEMD_DTW_NN")


class PipelineError(RuntimeError):
    """A stage failure annotated with the component it occurred in."""


@dataclass(frozen=True)
class FrameworkSpec:
    """Declarative description of one prediction framework run."""

    variant: str = "EMD_DTW_NN"
    predictor: PredictorConfig = field(default_factory=PredictorConfig)
    sift: SiftConfig = field(default_factory=SiftConfig)
    eemd: EemdConfig = field(default_factory=EemdConfig)
    split: Union[str, tuple] = "auto"
    grouping: GroupingConfig = field(default_factory=GroupingConfig)
    horizon: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.split != "auto":
            p, q = self.split
            if p < 0 or q < 1:
                raise ValueError(f"explicit split needs P >= 0 and Q >= 1, got ({p}, {q})")
            object.__setattr__(self, "split", (int(p), int(q)))


@dataclass(frozen=True)
class ForecastResult:
    """Combined and per-component forecasts plus run metadata.

    The combined forecast equals the ordered sum of the per-component
    forecasts to the last bit.
    """

    combined: np.ndarray
    per_component: tuple  # of (name, ndarray)
    metadata: dict

    def __post_init__(self):
        combined = np.asarray(self.combined, dtype=np.float64)
        combined.flags.writeable = False
        object.__setattr__(self, "combined", combined)
        parts = tuple((name, np.asarray(v, dtype=np.float64)) for name, v in self.per_component)
        object.__setattr__(self, "per_component", parts)
        total = np.zeros_like(combined)
        for _, values in parts:
            total = total + values
        if not np.array_equal(total, combined):
            raise ValueError("combined forecast is not the exact sum of components")

    def to_dict(self) -> dict:
        """JSON payload; timing is deliberately excluded so reruns with the
        same config and seeds serialize byte-identically."""
        meta = {k: v for k, v in self.metadata.items() if k != "elapsed_seconds"}
        return {
            "combined": self.combined.tolist(),
            "per_component": {name: v.tolist() for name, v in self.per_component},
            "metadata": meta,
        }


# ---------------------------------------------------------------------------
# Component split
# ---------------------------------------------------------------------------

def split_components(decomp: Decomposition, split: Union[str, tuple] = "auto") -> FrequencySplit:
    """Partition components into fast (high) and slow (low) groups.

    The component list is the IMFs in order with the residual appended
    last; the first P entries become the fast group. ``"auto"`` sets P to
    the number of IMFs whose zero-crossing count exceeds T/4 (at least 1
    whenever any IMF exists).
    """
    comps = decomp.components()
    n = decomp.n_imfs
    if split == "auto":
        threshold = decomp.source_length / 4.0
        p = sum(
            1 for imf in decomp.imfs if count_zero_crossings(imf.values) > threshold
        )
        if n >= 1:
            p = max(p, 1)
    else:
        p, q = split
        if p + q != n + 1:
            raise ValueError(
                f"split (P={p}, Q={q}) is inconsistent with {n} IMFs plus residual: "
                f"the constraint P+Q=N+1 requires P+Q={n + 1}"
            )
    return FrequencySplit(
        high=tuple(comps[:p]),
        low=tuple(comps[p:]),
        p_count=p,
        q_count=len(comps) - p,
    )


# ---------------------------------------------------------------------------
# Per-component forecasting
# ---------------------------------------------------------------------------

def forecast_low(component: TimeSeries, cfg: PredictorConfig, window: int,
                 horizon: int) -> np.ndarray:
    """Direct recursive forecast of a slow component.

    Trains one model on all (window -> next value) pairs of the normalized
    component, then feeds each prediction back into the input window.
    Returns denormalized predictions of length ``horizon``.
    """
    if len(component) <= window:
        raise ValueError(
            f"component length {len(component)} must exceed window {window}"
        )
    normalized, scale = minmax_normalize(component)
    training_set = sliding_window_set(normalized, window)
    model = train(training_set, cfg, scale=scale)
    session = ForecastSession(model)
    buf = list(normalized.values)
    preds = []
    for _ in range(horizon):
        preds.append(session.step(np.array(buf[-window:])))
        buf.append(preds[-1])
    return scale.inverse(np.array(preds))


def forecast_high(component: TimeSeries, grouping: GroupingConfig,
                  cfg: PredictorConfig, horizon: int,
                  trace: Optional[list] = None) -> np.ndarray:
    """Similarity-grouped recursive forecast of a fast component.

    Each step re-segments the component extended by the predictions so far,
    ranks all candidate windows by DTW distance to the trailing reference
    window, trains a fresh model on the selected group and predicts one
    value. Per-step seeds derive from ``cfg.seed``.

    Parameters
    ----------
    trace : list, optional
        When given, receives one record per step with the reference window,
        ranked candidates and selection, for provenance inspection.
    """
    length = grouping.segment_length
    if len(component) < 2 * length:
        raise ValueError(
            f"component length {len(component)} must be >= twice the segment "
            f"length ({2 * length})"
        )
    normalized, scale = minmax_normalize(component)
    buf = list(normalized.values)
    preds = []
    for step in range(horizon):
        extended = TimeSeries(buf)
        segments = segmentize(extended, length)
        reference = segments[-1]
        ranked = rank_by_similarity(segments, reference, grouping,
                                    parent_length=len(extended))
        selected = select_group(ranked, grouping)
        training_set = build_training_set(selected, len(selected), extended)
        step_cfg = replace(cfg, seed=derive_seed(cfg.seed, step))
        model = train(training_set, step_cfg, scale=scale)
        value = predict(model, reference.values)
        if trace is not None:
            trace.append({
                "step": step + 1,
                "reference_offset": reference.source_offset,
                "reference": [float(v) for v in reference.values],
                "candidates": [
                    {"offset": seg.source_offset, "distance": dist}
                    for seg, dist in ranked
                ],
                "selected_offsets": [seg.source_offset for seg, _ in selected],
                "prediction": float(value),
            })
        preds.append(value)
        buf.append(value)
    return scale.inverse(np.array(preds))


# ---------------------------------------------------------------------------
# Framework runner
# ---------------------------------------------------------------------------

def _component_names(n_imfs: int) -> list:
    return [f"imf_{i + 1}" for i in range(n_imfs)] + ["residual"]


def run_framework(series: TimeSeries, spec: FrameworkSpec, *,
                  seed: Optional[int] = None, workers: int = 1,
                  group_trace: Optional[dict] = None) -> ForecastResult:
    """Run one framework variant end to end.

    Parameters
    ----------
    series : TimeSeries
        Training data; forecasts start immediately after its last point.
    spec : FrameworkSpec
        Variant and stage configuration.
    seed : int, optional
        Overrides the predictor and ensemble seeds (used by the benchmark
        runner to give every run its own root).
    workers : int
        Thread count for ensemble trials; results are identical for any
        value.
    group_trace : dict, optional
        When given, maps fast-component names to per-step grouping records.

    Returns
    -------
    ForecastResult
        ``combined`` is the exact ordered sum of ``per_component``.
    """
    started = time.perf_counter()
    pred_cfg = spec.predictor if seed is None else replace(spec.predictor, seed=seed)
    eemd_cfg = spec.eemd if seed is None else replace(spec.eemd, seed=seed)
    eemd_cfg = replace(eemd_cfg, sift=spec.sift)  # one source of truth for sifting
    root = pred_cfg.seed
    window = spec.grouping.segment_length
    horizon = spec.horizon

    split_meta = None
    if spec.variant == "NN":
        parts = [("series", _forecast_component(
            series, "series", 0, forecast_low, pred_cfg, root, window, horizon))]
        n_imfs = None
    else:
        if spec.variant == "EEMD_DTW_NN":
            decomp = eemd(series, eemd_cfg, workers=workers)
        else:
            decomp = emd(series, spec.sift)
        names = _component_names(decomp.n_imfs)
        n_imfs = decomp.n_imfs
        if spec.variant == "EMD_NN":
            comps = decomp.components()
            parts = [
                (name, _forecast_component(
                    comp, name, idx, forecast_low, pred_cfg, root, window, horizon))
                for idx, (name, comp) in enumerate(zip(names, comps))
            ]
        else:
            fsplit = split_components(decomp, spec.split)
            split_meta = [fsplit.p_count, fsplit.q_count]
            parts = []
            for idx, comp in enumerate(fsplit.high):
                name = names[idx]
                trace = [] if group_trace is not None else None
                comp_cfg = replace(pred_cfg, seed=derive_seed(root, idx))
                try:
                    values = forecast_high(comp, spec.grouping, comp_cfg, horizon,
                                           trace=trace)
                except PipelineError:
                    raise
                except Exception as exc:
                    raise PipelineError(f"component {idx + 1} ({name}): {exc}") from exc
                if group_trace is not None:
                    group_trace[name] = trace
                parts.append((name, values))
            for offset, comp in enumerate(fsplit.low):
                idx = fsplit.p_count + offset
                name = names[idx]
                parts.append((name, _forecast_component(
                    comp, name, idx, forecast_low, pred_cfg, root, window, horizon)))

    combined = np.zeros(horizon)
    for _, values in parts:
        combined = combined + values

    metadata = {
        "variant": spec.variant,
        "root_seed": int(root),
        "split": split_meta,
        "horizon": horizon,
        "n_imfs": n_imfs,
        "elapsed_seconds": time.perf_counter() - started,
    }
    return ForecastResult(combined=combined, per_component=tuple(parts), metadata=metadata)


def _forecast_component(component, name, idx, fn, pred_cfg, root, window, horizon):
    comp_cfg = replace(pred_cfg, seed=derive_seed(root, idx))
    try:
        return fn(component, comp_cfg, window, horizon)
    except Exception as exc:
        raise PipelineError(f"component {idx + 1} ({name}): {exc}") from exc
