"""Regenerate the committed data fixtures. Deterministic; run from repo root.

    python3 tools/make_fixtures.py
"""

import numpy as np
from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "data"


def annual_throughput():
    # 21 annual points (1996..2016): growth trend with a slow swing, shaped
    # like port cargo throughput in 10^4 tonnes. First value pinned at 8382.
    years = np.arange(1996, 2017)
    i = np.arange(21)
    rng = np.random.default_rng(1996)
    values = (
        8382
        + 1650.0 * i
        + 12.0 * i**2
        + 3500.0 * np.sin(2 * np.pi * i / 10)
        + 1800.0 * np.sin(2 * np.pi * i / 2.8)
        + rng.uniform(-200, 200, 21)
    )
    values = np.round(values).astype(int)
    values[0] = 8382
    lines = [f"{y},{v}" for y, v in zip(years, values)]
    (DATA / "pct_annual_fixture.csv").write_text("\n".join(lines) + "\n")


def vtf_3hourly():
    # 15 days of 3-hourly vessel counts (8 points/day, 120 points): daily
    # cycle, a slow multi-day swing, positive integer counts.
    t = np.arange(1, 121)
    rng = np.random.default_rng(121)
    values = (
        38.0
        + 6.0 * np.sin(2 * np.pi * (t - 2) / 8)
        + 3.0 * np.sin(2 * np.pi * t / 40)
        + rng.uniform(-2.5, 2.5, 120)
    )
    values = np.clip(np.round(values), 20, None).astype(int)
    lines = ["time_point,vessels"] + [f"{tp},{v}" for tp, v in zip(t, values)]
    (DATA / "vtf_3hourly_fixture.csv").write_text("\n".join(lines) + "\n")


def vtf_actuals():
    # Holdout-day actual vessel counts at points 121..128.
    actuals = [34.00, 37.00, 36.00, 41.00, 48.00, 39.00, 38.00, 34.00]
    lines = ["time_point,vessels"] + [
        f"{121 + i},{v:.2f}" for i, v in enumerate(actuals)
    ]
    (DATA / "vtf_table1_actuals.csv").write_text("\n".join(lines) + "\n")


def synthetic_benchmark():
    # Trend + two tones + uniform noise, 144 points; the benchmark holdout
    # is the last 8 points.
    t = np.arange(1, 145)
    rng = np.random.default_rng(20260809)
    x = (
        0.05 * t
        + 3.0 * np.sin(2 * np.pi * t / 24)
        + np.sin(2 * np.pi * t / 6)
        + rng.uniform(-0.2, 0.2, 144)
    )
    lines = ["time_point,value"] + [f"{tp},{float(v)!r}" for tp, v in zip(t, x)]
    (DATA / "synthetic_benchmark.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    annual_throughput()
    vtf_3hourly()
    vtf_actuals()
    synthetic_benchmark()
    for f in sorted(DATA.glob("*.csv")):
        print(f, len(f.read_text().splitlines()), "lines")
