"""Discords of every length in a range, with an adaptive distance threshold.

Lengths are processed in increasing order. The threshold ``r`` (plain,
not squared, distance units) for each length is guessed from the
distances found at the previous lengths and lowered until the range
discord search returns at least ``top_k`` discords:

* shortest length: start at ``2 sqrt(minL)`` (the largest possible
  distance) and halve;
* next four lengths: 99% of the previous length's smallest kept distance,
  then 99% of the last try;
* afterwards: mean minus two standard deviations of the last five kept
  distances, then subtract one standard deviation per failed try.
"""

from __future__ import annotations

import enum
import logging
import math
from collections.abc import Sequence

import numpy as np

from .core import MultiLengthDiscordSet, as_series, check_length, sort_records
from .pardrag import pardrag
from .stats import advance_stats, init_stats

log = logging.getLogger(__name__)

#: Each retry lowers ``r`` by at least this fraction of its current value.
MIN_DECREMENT = 0.01
#: Threshold reductions allowed per length before it is reported as failed.
MAX_RETRIES = 100


class Phase(enum.Enum):
    FIRST = "first"
    WARMUP = "warmup"
    STEADY = "steady"


def phase_for(m: int, min_length: int) -> Phase:
    if m == min_length:
        return Phase.FIRST
    if m < min_length + 5:
        return Phase.WARMUP
    return Phase.STEADY


def next_threshold(history: Sequence[float], phase: Phase | str, last_r: float | None = None,
                   failed: bool = False, min_length: int | None = None) -> float:
    """The next threshold to try.

    ``history`` holds the smallest kept nn distance of each earlier
    successful length (oldest first). ``failed`` asks for the retry value
    after a try at ``last_r`` came back short.
    """
    phase = Phase(phase)
    if failed:
        if last_r is None:
            raise ValueError("a retry needs last_r")
        if phase is Phase.FIRST:
            return 0.5 * last_r
        if phase is Phase.WARMUP:
            return 0.99 * last_r
        sigma = float(np.std(history[-5:])) if history else 0.0
        return last_r - max(sigma, MIN_DECREMENT * last_r)

    if phase is Phase.FIRST or not history:
        if min_length is None:
            raise ValueError("the first threshold needs min_length")
        return 2.0 * math.sqrt(min_length)
    if phase is Phase.WARMUP:
        return 0.99 * history[-1]
    window = np.asarray(history[-5:], dtype=float)
    r = float(window.mean() - 2.0 * window.std())
    if r <= 0.0:
        r = MIN_DECREMENT * history[-1]
    return r


def _search_seglen(seglen: int | None, m: int, n: int) -> int:
    """Segment width used at length ``m``.

    Narrow segments let the candidate scan of a segment stop as soon as
    all of its subsequences are cleared, so by default each segment holds
    ``max(64, m // 3)`` subsequences. An explicit ``seglen`` is used as is
    when it leaves room for at least one subsequence per segment.
    """
    if seglen is None or seglen <= m:
        seglen = m + max(64, m // 3) - 1
    return min(seglen, n)


def merlin(T, min_length: int, max_length: int, top_k: int = 1, seglen: int | None = None,
           workers: int | None = 1, *, reuse_stats: bool = True,
           max_retries: int = MAX_RETRIES) -> MultiLengthDiscordSet:
    """Top-``top_k`` discords of every length ``min_length..max_length``.

    ``seglen=None`` picks a segment width per length (see
    :func:`_search_seglen`). A length whose search still falls short after ``max_retries`` threshold
    reductions is listed in ``failed`` and contributes nothing.
    """
    series = as_series(T)
    n = series.n
    if min_length > max_length:
        raise ValueError(f"min_length {min_length} exceeds max_length {max_length}")
    check_length(n, min_length)
    check_length(n, max_length)
    if top_k < 1:
        raise ValueError("top_k must be >= 1")

    result = MultiLengthDiscordSet(min_length, max_length)
    history: list[float] = []
    size = n - min_length + 1
    stats = init_stats(series, min_length, size=size)

    for m in range(min_length, max_length + 1):
        if m > min_length:
            stats = advance_stats(stats, series) if reuse_stats else init_stats(series, m, size=size)
        phase = phase_for(m, min_length)
        # with nothing to go on, restart the way the first length does
        if phase is not Phase.FIRST and not history:
            phase = Phase.FIRST
        r = next_threshold(history, phase, min_length=m if phase is Phase.FIRST else min_length)
        width = _search_seglen(seglen, m, n)

        found = None
        for attempt in range(max_retries + 1):
            r = max(r, 0.0)
            records = pardrag(series, m, r * r, width, workers, stats=stats)
            if len(records) >= top_k:
                found = records
                break
            if r == 0.0:
                break
            r = next_threshold(history, phase, last_r=r, failed=True)

        if found is None:
            log.warning("length %d: no %d discords after %d tries", m, top_k, attempt + 1)
            result.failed.append(m)
            continue
        kept = sort_records(found)[:top_k]
        result.per_length[m] = kept
        result.thresholds[m] = r
        history.append(kept[-1].nn_dist)
        log.debug("length %d: r=%.6g, %d found, %d tries", m, r, len(found), attempt + 1)
    return result
