"""Segment-parallel range-discord search.

The series is cut into equal segments (:func:`~palmad.core.compute_layout`).
Each segment treats its own subsequences as local candidates and sweeps
chunks of the series, one segment-length window at a time: to its right
during selection, to its left during refinement. Within a chunk, the dot
products between the segment's subsequences and the chunk's k-th
subsequence are obtained from those of the (k-1)-th in O(1) each.

Shared state is two boolean bitmaps and a vector of nearest-neighbour
distances. Every shared write is monotone (a flag goes TRUE -> FALSE, a
distance goes down), so the outcome does not depend on how segments are
scheduled over workers. Writes a segment makes outside its own candidate
range go to a worker-private buffer that is folded in once the phase ends.
"""

from __future__ import annotations

import itertools
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np

from .core import DiscordRecord, SegmentLayout, as_series, check_length, compute_layout, sort_records
from .distance import _dot, _pair_sq_dist, _sq_ednorm
from .stats import RollingStats, init_stats

DEFAULT_SEGLEN = 512


@dataclass
class SelectionState:
    """Bitmaps and nn vector over the padded candidate range ``0..N'-1``.

    Indices here are 0-based. ``nn_index`` is the partner realising
    ``nn_dist_sq`` (``-1`` while no admissible pair has been seen).
    """

    cand: np.ndarray
    neighbor: np.ndarray
    nn_dist_sq: np.ndarray
    nn_index: np.ndarray
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @classmethod
    def fresh(cls, layout: SegmentLayout) -> "SelectionState":
        size = layout.padded_count
        real = np.zeros(size, dtype=bool)
        real[: layout.num_subseq] = True
        return cls(
            cand=real.copy(),
            neighbor=real.copy(),
            nn_dist_sq=np.full(size, np.inf),
            nn_index=np.full(size, -1, dtype=np.int64),
        )

    def lower(self, i: int, value: float, partner: int) -> None:
        """Atomic min-update of entry ``i`` (ties go to the lower partner)."""
        with self._lock:
            cur = self.nn_dist_sq[i]
            if value < cur or (value == cur and 0 <= partner < self.nn_index[i]):
                self.nn_dist_sq[i] = value
                self.nn_index[i] = partner

    def clear_cand(self, i: int) -> None:
        self.cand[i] = False

    def clear_neighbor(self, i: int) -> None:
        self.neighbor[i] = False

    def merge(self, neighbor: np.ndarray, nn_dist_sq: np.ndarray, nn_index: np.ndarray) -> None:
        """Fold in one worker's private buffers."""
        with self._lock:
            self.neighbor &= neighbor
            _lexmin_into(self.nn_dist_sq, self.nn_index, nn_dist_sq, nn_index)

    def private_buffers(self):
        size = self.cand.size
        return (
            np.ones(size, dtype=bool),
            np.full(size, np.inf),
            np.full(size, -1, dtype=np.int64),
        )

    def copy(self) -> "SelectionState":
        return SelectionState(self.cand.copy(), self.neighbor.copy(),
                              self.nn_dist_sq.copy(), self.nn_index.copy())


def _lexmin_into(dist, idx, other_dist, other_idx):
    better = (other_dist < dist) | ((other_dist == dist) & (other_idx >= 0) & ((idx < 0) | (other_idx < idx)))
    dist[better] = other_dist[better]
    idx[better] = other_idx[better]


@dataclass(frozen=True)
class _Inputs:
    T: np.ndarray       # original values, reference distance route
    Tc: np.ndarray      # centred values, dot products
    mu: np.ndarray      # centred means, valid prefix
    sigma: np.ndarray
    band_scale: float
    r_sq: float


def _prepare(series, m, r_sq, stats, layout):
    if stats is None:
        stats = init_stats(series, m)
    if stats.m != m:
        raise ValueError(f"stats are for length {stats.m}, not {m}")
    N = layout.num_subseq
    shift = float(series.values.mean())
    Tc = series.values - shift
    mu = np.ascontiguousarray(stats.mu[:N] - shift)
    sigma = np.ascontiguousarray(stats.sigma[:N])
    scale = float(np.max(np.abs(series.values))) ** 2
    steps = 4 * m + 2 * layout.seg_n + 2 * stats.advances
    band_scale = 256.0 * np.finfo(np.float64).eps * steps * scale
    return _Inputs(series.values, Tc, mu, sigma, band_scale, float(r_sq))


@numba.njit(cache=True, nogil=True, inline="always")
def _verdict(d, r_sq, band_scale, sa, sb):
    """1 if the pair is surely closer than ``r``, 0 if surely not, -1 if the
    fast value is too near the boundary to decide.

    The tolerance is ``1e-9 (1 + r_sq) + band_scale / (sa sb)``; both sides
    are multiplied through by ``sa sb`` to keep division out of the loop.
    """
    s = sa * sb
    if s > 0.0:
        margin = (1e-9 * (1.0 + r_sq)) * s + band_scale
        gap = (r_sq - d) * s
        if gap > margin:
            return 1
        if -gap >= margin:
            return 0
    return -1


@numba.njit(cache=True, nogil=True)
def _reference_closer(T, a, b, m, r_sq):
    return _pair_sq_dist(T, a, b, m) < r_sq


@numba.njit(cache=True, nogil=True, inline="always")
def _lower(nn, nn_idx, i, d, j):
    cur = nn[i]
    if d <= cur:
        if d < cur or j < nn_idx[i]:
            nn[i] = d
            nn_idx[i] = j


@numba.njit(cache=True, nogil=True)
def _any(flags, lo, hi):
    for i in range(lo, hi):
        if flags[i]:
            return True
    return False


@numba.njit(cache=True, nogil=True, inline="always")
def _select_column(T, Tc, mu, sigma, m, r_sq, band_scale, S, nloc, b, qcol,
                   cand, nn, nn_idx, nb_priv, nnp, nnp_idx, pending, pend_d):
    # pairs the fast route cannot decide are settled after the lane loop;
    # every update here commutes, so the order does not matter
    # The chunk side's minimum is kept in locals and written once: lanes run
    # in increasing a, so a strict comparison keeps the lower-index tie rule.
    evaluated = 0
    npend = 0
    far = False
    best = np.inf
    best_a = -1
    for t in range(nloc):
        a = S + t
        if b - a < m:
            continue
        d = _sq_ednorm(qcol[t], m, mu[a], mu[b], sigma[a], sigma[b])
        evaluated += 1
        v = _verdict(d, r_sq, band_scale, sigma[a], sigma[b])
        if v == 1:
            cand[a] = False
            far = True
        elif v == 0:
            if d < best:
                best = d
                best_a = a
            _lower(nn, nn_idx, a, d, b)
        else:
            pending[npend] = a
            pend_d[npend] = d
            npend += 1
    for p in range(npend):
        a = pending[p]
        d = pend_d[p]
        if _reference_closer(T, a, b, m, r_sq):
            cand[a] = False
            far = True
        else:
            if d < best or (d == best and a < best_a):
                best = d
                best_a = a
            _lower(nn, nn_idx, a, d, b)
    if far:
        nb_priv[b] = False
    if best_a >= 0:
        _lower(nnp, nnp_idx, b, best, best_a)
    return evaluated


@numba.njit(cache=True, nogil=True)
def _select_segment(T, Tc, mu, sigma, m, seg_n, r_sq, band_scale, s,
                    cand, nn, nn_idx, nb_priv, nnp, nnp_idx, early_exit):
    N = mu.size
    S = s * seg_n
    nloc = min(seg_n, N - S)
    if nloc <= 0:
        return 0
    qrow = np.empty(seg_n)
    qcol = np.empty(seg_n)
    pending = np.empty(seg_n, dtype=np.int64)
    pend_d = np.empty(seg_n)
    evaluated = 0
    c0 = S + m - 1  # first chunk starts at the segment's m-th element
    while c0 < N:
        kmax = min(seg_n, N - c0)
        for k in range(kmax):
            qrow[k] = _dot(Tc, S, c0 + k, m)
        for t in range(nloc):
            qcol[t] = _dot(Tc, c0, S + t, m)
        evaluated += _select_column(T, Tc, mu, sigma, m, r_sq, band_scale, S, nloc, c0, qcol,
                                    cand, nn, nn_idx, nb_priv, nnp, nnp_idx, pending, pend_d)
        if early_exit and not _any(cand, S, S + nloc):
            return evaluated
        for k in range(1, kmax):
            b = c0 + k
            for t in range(nloc - 1, 0, -1):
                qcol[t] = qcol[t - 1] + Tc[S + t + m - 1] * Tc[b + m - 1] - Tc[S + t - 1] * Tc[b - 1]
            qcol[0] = qrow[k]
            evaluated += _select_column(T, Tc, mu, sigma, m, r_sq, band_scale, S, nloc, b, qcol,
                                        cand, nn, nn_idx, nb_priv, nnp, nnp_idx, pending, pend_d)
        if early_exit and not _any(cand, S, S + nloc):
            return evaluated
        c0 += seg_n
    return evaluated


@numba.njit(cache=True, nogil=True, inline="always")
def _refine_column(T, mu, sigma, m, r_sq, band_scale, S, nloc, b, qcol, cand, nn, nn_idx,
                   pending, pend_d):
    evaluated = 0
    npend = 0
    for t in range(nloc):
        a = S + t
        if not cand[a] or a - b < m:
            continue
        d = _sq_ednorm(qcol[t], m, mu[a], mu[b], sigma[a], sigma[b])
        evaluated += 1
        v = _verdict(d, r_sq, band_scale, sigma[a], sigma[b])
        if v == 1:
            cand[a] = False
        elif v == 0:
            _lower(nn, nn_idx, a, d, b)
        else:
            pending[npend] = a
            pend_d[npend] = d
            npend += 1
    for p in range(npend):
        a = pending[p]
        if _reference_closer(T, a, b, m, r_sq):
            cand[a] = False
        else:
            _lower(nn, nn_idx, a, pend_d[p], b)
    return evaluated


@numba.njit(cache=True, nogil=True)
def _refine_segment(T, Tc, mu, sigma, m, seg_n, r_sq, band_scale, s, cand, nn, nn_idx, early_exit):
    N = mu.size
    S = s * seg_n
    nloc = min(seg_n, N - S)
    if nloc <= 0 or not _any(cand, S, S + nloc):
        return 0
    qrow = np.empty(seg_n)
    qcol = np.empty(seg_n)
    pending = np.empty(seg_n, dtype=np.int64)
    pend_d = np.empty(seg_n)
    evaluated = 0
    cs = S - m + 1  # overlaps the segment; inadmissible pairs are skipped
    while cs + seg_n > 0:
        k0 = max(0, -cs)
        kmax = min(seg_n, N - cs)
        for k in range(k0, kmax):
            qrow[k] = _dot(Tc, S, cs + k, m)
        b = cs + k0
        for t in range(nloc):
            qcol[t] = _dot(Tc, b, S + t, m)
        evaluated += _refine_column(T, mu, sigma, m, r_sq, band_scale, S, nloc, b, qcol, cand, nn, nn_idx,
                                        pending, pend_d)
        if early_exit and not _any(cand, S, S + nloc):
            return evaluated
        for k in range(k0 + 1, kmax):
            b = cs + k
            for t in range(nloc - 1, 0, -1):
                qcol[t] = qcol[t - 1] + Tc[S + t + m - 1] * Tc[b + m - 1] - Tc[S + t - 1] * Tc[b - 1]
            qcol[0] = qrow[k]
            evaluated += _refine_column(T, mu, sigma, m, r_sq, band_scale, S, nloc, b, qcol, cand, nn, nn_idx,
                                        pending, pend_d)
        if early_exit and not _any(cand, S, S + nloc):
            return evaluated
        cs -= seg_n
    return evaluated


def _resolve_workers(workers):
    if workers is None:
        return os.cpu_count() or 1
    if workers < 1:
        raise ValueError("workers must be >= 1")
    return int(workers)


def _run_segments(num_seg, workers, task):
    """Call ``task(segment, worker)`` for every segment; segments are handed
    out dynamically, so the assignment varies but results must not."""
    if workers == 1 or num_seg == 1:
        for s in range(num_seg):
            task(s, 0)
        return
    counter = itertools.count()

    def loop(w):
        while True:
            s = next(counter)
            if s >= num_seg:
                return
            task(s, w)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        for f in [pool.submit(loop, w) for w in range(min(workers, num_seg))]:
            f.result()


def par_select(T, m: int, r_sq: float, stats: RollingStats | None, layout: SegmentLayout,
               *, workers: int | None = 1, early_exit: bool = True) -> SelectionState:
    """Candidate selection: each segment scans the chunks to its right."""
    series = as_series(T)
    inp = _prepare(series, m, r_sq, stats, layout)
    workers = _resolve_workers(workers)
    state = SelectionState.fresh(layout)
    buffers = [state.private_buffers() for _ in range(min(workers, layout.num_seg))]

    def task(s, w):
        nb, nnp, nnp_idx = buffers[w]
        _select_segment(inp.T, inp.Tc, inp.mu, inp.sigma, m, layout.seg_n, inp.r_sq, inp.band_scale, s,
                        state.cand, state.nn_dist_sq, state.nn_index, nb, nnp, nnp_idx, early_exit)

    _run_segments(layout.num_seg, workers, task)
    for nb, nnp, nnp_idx in buffers:
        state.merge(nb, nnp, nnp_idx)
    return state


def conjoin_bitmaps(state: SelectionState) -> SelectionState:
    """A subsequence whose nearest neighbour was pruned cannot be a discord."""
    out = state.copy()
    out.cand &= out.neighbor
    return out


def par_refine(T, m: int, r_sq: float, stats: RollingStats | None, layout: SegmentLayout,
               state: SelectionState, *, workers: int | None = 1,
               early_exit: bool = True) -> list[DiscordRecord]:
    """Refinement: segments that still hold candidates scan to their left.

    ``state`` is updated in place. Reported distances come from the
    reference route for the recorded nearest partner.
    """
    series = as_series(T)
    N = layout.num_subseq
    if not state.cand[:N].any():
        return []
    inp = _prepare(series, m, r_sq, stats, layout)
    workers = _resolve_workers(workers)

    def task(s, w):
        _refine_segment(inp.T, inp.Tc, inp.mu, inp.sigma, m, layout.seg_n, inp.r_sq, inp.band_scale, s,
                        state.cand, state.nn_dist_sq, state.nn_index, early_exit)

    _run_segments(layout.num_seg, workers, task)
    records = []
    for a in np.flatnonzero(state.cand[:N]):
        j = int(state.nn_index[a])
        if j < 0:
            continue
        d = float(_pair_sq_dist(inp.T, int(a), j, m))
        records.append(DiscordRecord(int(a) + 1, m, d, j + 1))
    return sort_records(records)


def pardrag(T, m: int, r_sq: float, seglen: int = DEFAULT_SEGLEN, workers: int | None = 1,
            *, stats: RollingStats | None = None, early_exit: bool = True) -> list[DiscordRecord]:
    """Range discords of length ``m`` at squared threshold ``r_sq``.

    Same result as :func:`palmad.drag.drag`, for any ``seglen`` and
    ``workers``. A ``seglen`` beyond the series length is capped to it.
    """
    if r_sq < 0:
        raise ValueError("r_sq must be non-negative")
    series = as_series(T)
    check_length(series.n, m)
    layout = compute_layout(series.n, m, min(seglen, series.n))
    if stats is None:
        stats = init_stats(series, m)
    state = par_select(series, m, r_sq, stats, layout, workers=workers, early_exit=early_exit)
    state = conjoin_bitmaps(state)
    return par_refine(series, m, r_sq, stats, layout, state, workers=workers, early_exit=early_exit)
