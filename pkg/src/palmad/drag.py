"""Serial range-discord search and the brute-force nearest-neighbour oracle.

Both work on the reference distance route (z-normalise, then sum), so
their values agree bit-for-bit with each other and with the parallel
engine's reported distances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import DiscordRecord, as_series, check_length, sort_records
from .distance import _znorm_matrix, _zrows_sq_dist


@dataclass
class CandidateSet:
    """Candidates surviving selection, as 1-based indices with the best
    squared distance seen so far (``inf`` before refinement)."""

    entries: list[tuple[int, float]]

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


@numba.njit(cache=True, nogil=True)
def _select(Z, ok, m, r_sq):
    N = Z.shape[0]
    cand = np.empty(N, dtype=np.int64)
    cand[0] = 0
    size = 1
    for s in range(1, N):
        is_cand = True
        keep = 0
        for p in range(size):
            c = cand[p]
            if abs(s - c) >= m and _zrows_sq_dist(Z[s], ok[s], Z[c], ok[c], r_sq) >= 0.0:
                # c lies within r of s: evict it, and s cannot join
                is_cand = False
                continue
            cand[keep] = c
            keep += 1
        size = keep
        if is_cand:
            cand[size] = s
            size += 1
    return cand[:size].copy()


@numba.njit(cache=True, nogil=True)
def _refine(Z, ok, m, r_sq, cand, abandon):
    N = Z.shape[0]
    nn = np.full(cand.size, np.inf)
    nn_idx = np.full(cand.size, -1, dtype=np.int64)
    alive = np.ones(cand.size, dtype=np.bool_)
    for p in range(cand.size):
        c = cand[p]
        for s in range(N):
            if abs(s - c) < m:
                continue
            bound = nn[p] if abandon else np.inf
            d = _zrows_sq_dist(Z[c], ok[c], Z[s], ok[s], bound)
            if d < 0.0:
                continue
            if d < r_sq:
                alive[p] = False
                break
            if d < nn[p]:
                nn[p] = d
                nn_idx[p] = s
    return alive, nn, nn_idx


def _prepare(T, m):
    series = as_series(T)
    check_length(series.n, m)
    return series, *_znorm_matrix(series.values, m)


def drag_select(T, m: int, r_sq: float) -> CandidateSet:
    """Phase one: one left-to-right scan keeping a running candidate set.

    Each new subsequence evicts every non-overlapping candidate closer than
    ``r`` and joins the set only if it evicted nothing.
    """
    if r_sq < 0:
        raise ValueError("r_sq must be non-negative")
    _, Z, ok = _prepare(T, m)
    cand = _select(Z, ok, m, float(r_sq))
    return CandidateSet([(int(c) + 1, np.inf) for c in cand])


def drag_refine(T, m: int, r_sq: float, C: CandidateSet, *, abandon: bool = True) -> list[DiscordRecord]:
    """Phase two: drop false positives and settle the exact nn distances."""
    _, Z, ok = _prepare(T, m)
    cand = np.array([i - 1 for i in C.indices], dtype=np.int64)
    alive, nn, nn_idx = _refine(Z, ok, m, float(r_sq), cand, abandon)
    records = [
        DiscordRecord(int(c) + 1, m, float(d), int(j) + 1)
        for c, a, d, j in zip(cand, alive, nn, nn_idx)
        if a and j >= 0
    ]
    return sort_records(records)


def drag(T, m: int, r_sq: float, *, abandon: bool = True) -> list[DiscordRecord]:
    """All subsequences whose nearest non-self match is at squared distance
    ``>= r_sq``, sorted by distance (descending)."""
    if r_sq < 0:
        raise ValueError("r_sq must be non-negative")
    _, Z, ok = _prepare(T, m)
    cand = _select(Z, ok, m, float(r_sq))
    alive, nn, nn_idx = _refine(Z, ok, m, float(r_sq), cand, abandon)
    records = [
        DiscordRecord(int(c) + 1, m, float(d), int(j) + 1)
        for c, a, d, j in zip(cand, alive, nn, nn_idx)
        if a and j >= 0
    ]
    return sort_records(records)


@numba.njit(cache=True, nogil=True)
def _brute_nn(Z, ok, m):
    N = Z.shape[0]
    nn = np.full(N, np.inf)
    nn_idx = np.full(N, -1, dtype=np.int64)
    for i in range(N):
        for j in range(i + m, N):
            d = _zrows_sq_dist(Z[i], ok[i], Z[j], ok[j], np.inf)
            if d < nn[i]:
                nn[i] = d
                nn_idx[i] = j
            if d < nn[j] or (d == nn[j] and i < nn_idx[j]):
                nn[j] = d
                nn_idx[j] = i
    return nn, nn_idx


def brute_force_nn(T, m: int, *, return_index: bool = False):
    """Squared nn distance of every subsequence by exhaustive comparison.

    Entry ``k`` is for the subsequence starting at 1-based ``k + 1``. A
    subsequence without any non-overlapping partner gets ``inf``.
    """
    _, Z, ok = _prepare(T, m)
    nn, nn_idx = _brute_nn(Z, ok, m)
    if return_index:
        return nn, nn_idx + 1
    return nn


def brute_force_topk(T, m: int, k: int) -> list[DiscordRecord]:
    """The ``k`` subsequences with the largest nn distance (ties: lower index)."""
    nn, nn_idx = brute_force_nn(T, m, return_index=True)
    if not 1 <= k <= nn.size:
        raise ValueError(f"k must be in 1..{nn.size}, got {k}")
    finite = np.flatnonzero(np.isfinite(nn))
    order = finite[np.lexsort((finite, -nn[finite]))][:k]
    return [DiscordRecord(int(i) + 1, m, float(nn[i]), int(nn_idx[i])) for i in order]


def range_discord_oracle(T, m: int, r_sq: float) -> list[DiscordRecord]:
    """``{ i : nn(i) >= r_sq }`` straight from :func:`brute_force_nn`."""
    nn, nn_idx = brute_force_nn(T, m, return_index=True)
    keep = np.flatnonzero(np.isfinite(nn) & (nn >= r_sq))
    return sort_records(DiscordRecord(int(i) + 1, m, float(nn[i]), int(nn_idx[i])) for i in keep)
