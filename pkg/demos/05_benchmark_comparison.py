"""Comparing frameworks over repeated seeded runs on a synthetic series.

The series is a linear trend plus a daily-scale and a sub-daily tone with
uniform noise; the last 8 points are held out. Every framework trains on
the rest, forecasts the holdout, and the mean relative error over 10
seeded runs (mean +/- population std) ranks the frameworks. Decomposition
helps, and similarity grouping helps again on top of it.

This is the same experiment as configs/benchmark_synthetic.json, run here
with fewer ensemble trials so it finishes in a few seconds.
"""

from pathlib import Path

from modecast import (
    EemdConfig,
    FrameworkSpec,
    GroupingConfig,
    PredictorConfig,
    benchmark,
    load_csv,
)

REPO = Path(__file__).resolve().parents[1]
series = load_csv(REPO / "data" / "synthetic_benchmark.csv", column=2, has_header=True)
holdout = 136
runs = 10
seeds = list(range(101, 111))

common = dict(
    predictor=PredictorConfig(kind="BPNN", epochs=1500, seed=0),
    grouping=GroupingConfig(segment_length=8, group_size=10),
    eemd=EemdConfig(ensemble_size=25, noise_amplitude=0.1, seed=0),
)
specs = [
    FrameworkSpec(variant=v, **common)
    for v in ("NN", "EMD_NN", "EMD_DTW_NN", "EEMD_DTW_NN")
]

print(f"series length {len(series)}, holdout last {len(series) - holdout} points, "
      f"{runs} runs per framework")
reports = benchmark(series, holdout, specs, runs, seeds)

print(f"\n{'framework':<16} {'mean RE':>9} {'std RE':>9}")
for rep in reports:
    print(f"{rep.label:<16} {rep.re_mean_over_runs:>9.4f} {rep.re_std_over_runs:>9.4f}")

best = min(reports, key=lambda r: r.re_mean_over_runs)
print(f"\nbest framework: {best.label}")
print("holdout point-by-point (actual vs mean prediction):")
for actual, predicted, re in best.per_point:
    print(f"  {actual:8.3f}  {predicted:8.3f}  (RE {re:.3f})")
