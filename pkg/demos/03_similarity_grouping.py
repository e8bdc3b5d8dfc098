"""Building a training set from the windows most similar to the recent past.

A fast-fluctuating component is sliced into every overlapping window of
length L. The trailing window is the reference; all earlier windows that
still have a successor value are ranked by warped distance to it, and the
closest ones contribute (window -> next value) training pairs. On a
periodic component the in-phase repeats of the reference rank first and
their successors all agree, which is exactly what makes the grouped
training set better than an indiscriminate sliding window.
"""

import numpy as np

from modecast import (
    GroupingConfig,
    TimeSeries,
    build_training_set,
    rank_by_similarity,
    segmentize,
)

t = np.arange(40)
component = TimeSeries(np.sin(2 * np.pi * t / 8) + 0.05 * np.sin(2 * np.pi * t / 3))
L = 8

segments = segmentize(component, L)
reference = segments[-1]
print(f"{len(segments)} overlapping windows of length {L} "
      f"(offsets 1..{segments[-1].source_offset})")
print(f"reference = trailing window at offset {reference.source_offset}")

cfg = GroupingConfig(segment_length=L, group_size=5)
ranked = rank_by_similarity(segments, reference, cfg)
print("\nrank  offset  distance")
for rank, (seg, dist) in enumerate(ranked[:8], start=1):
    marker = " <- in phase with the reference" if (reference.source_offset - seg.source_offset) % 8 == 0 else ""
    print(f"{rank:4d}  {seg.source_offset:6d}  {dist:8.4f}{marker}")

training = build_training_set(ranked, cfg.group_size, component)
print(f"\ntop-{cfg.group_size} training pairs (window -> next value):")
for (offset, dist), target in zip(training.provenance, training.targets):
    print(f"  offset {offset:2d} (distance {dist:.4f}) -> target {target:+.4f}")
true_next = np.sin(2 * np.pi * 40 / 8) + 0.05 * np.sin(2 * np.pi * 40 / 3)
print(f"\ntrue next value of the component: {true_next:+.4f}")
