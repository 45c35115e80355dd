"""
Range discords on a random walk
===============================

A range discord is a subsequence whose nearest non-overlapping match is at
least ``r`` away. This walk-through computes them by brute force, then
checks that the serial and the segment-parallel searches agree with it.
"""

import time

import numpy as np

from palmad import brute_force_nn, drag, gen_randomwalk, pardrag

T = gen_randomwalk(3000, seed=1)
m = 24

# Brute force gives every subsequence's squared nearest-neighbour distance.
nn = brute_force_nn(T, m)
print(f"{nn.size} subsequences of length {m}; nn distance ranges "
      f"{np.sqrt(nn.min()):.3f} .. {np.sqrt(nn.max()):.3f}")

# Pick the threshold so that roughly the top 1% qualify.
r = float(np.sqrt(np.percentile(nn, 99)))
expected = set(np.flatnonzero(nn >= r * r) + 1)
print(f"r = {r:.3f}: {len(expected)} subsequences qualify")

t0 = time.perf_counter()
serial = drag(T, m, r * r)
t1 = time.perf_counter()
parallel = pardrag(T, m, r * r, seglen=128, workers=4)
t2 = time.perf_counter()

print(f"serial search:   {len(serial)} discords in {t1 - t0:.3f} s")
print(f"parallel search: {len(parallel)} discords in {t2 - t1:.3f} s")
assert {d.index for d in serial} == {d.index for d in parallel} == expected
assert [d.nn_dist_sq for d in serial] == [d.nn_dist_sq for d in parallel]

# Records come sorted by distance; the first is the classic top discord.
for d in parallel[:5]:
    print(f"  start {d.index:5d}  nn distance {d.nn_dist:.4f}  nearest match at {d.neighbor}")
