"""
A discord heatmap for a month of sensor readings
================================================

Readings every 15 minutes for 30 days follow a daily cycle that is
quieter at weekends. Two faults are planted: a sensor stuck for 15 hours
and a sudden drop with a slow recovery. Discords of lengths from four hours to two days
are normalised to a common [0, 2] scale, drawn as a grayscale heatmap
(one row per length), and ranked by each start index's strongest length.

Output goes to ``heatmap_out/`` next to this script.
"""

from pathlib import Path

import numpy as np

from palmad import build_heatmap, merlin, rank_discords
from palmad.heatmap import write_heatmap_csv, write_pgm, write_ranking_csv

rng = np.random.default_rng(11)
day = 96
t = np.arange(30 * day)
weekday = ((t // day) % 7) < 5
T = 18 + 3 * np.sin(2 * np.pi * t / day) + 1.5 * weekday * np.sin(np.pi * (t % day) / day)
T += 0.05 * rng.standard_normal(t.size)
T[900:960] = T[900]                           # sensor stuck for 15 hours
T[2100:2124] -= 5 * np.exp(-np.arange(24) / 5)  # door left open, slow recovery

min_length, max_length = 16, 192
result = merlin(T, min_length, max_length, top_k=5)
h = build_heatmap(result, T.size)
print(f"heatmap: {h.scores.shape[0]} lengths x {h.scores.shape[1]} start indices, "
      f"max score {h.scores.max():.3f}")

# The raw ranking lists neighbouring start indices of the same event: a
# stuck sensor gives a flat window, and a flat window against anything
# else scores exactly 1 under the constant-subsequence convention.
ranking = rank_discords(h, 6)
for rank, (index, length, score) in enumerate(ranking, start=1):
    print(f"{rank}. start {index:5d} (day {(index - 1) // day + 1:2d}), best at {length / 4:5.2f} h, score {score:.3f}")

# To list distinct events, walk down the full ranking and skip any start
# that overlaps one already listed.
picked = []
for index, length, score in rank_discords(h, h.scores.shape[1]):
    if all(index + length <= i or i + m <= index for i, m, _ in picked):
        picked.append((index, length, score))
    if len(picked) == 3:
        break
print("distinct events:")
for index, length, score in picked:
    print(f"  day {(index - 1) // day + 1:2d}, {((index - 1) % day) / 4:5.2f} h into the day, "
          f"{length / 4:5.2f} h long, score {score:.3f}")

out = Path(__file__).with_name("heatmap_out")
out.mkdir(exist_ok=True)
write_heatmap_csv(h, out / "heatmap.csv")
write_pgm(h, out / "heatmap.pgm")
write_ranking_csv(ranking, out / "ranking.csv")
print(f"wrote {out}/heatmap.csv, heatmap.pgm and ranking.csv")
