"""Z-normalised Euclidean distances and sliding dot products.

All kernel-facing distances are *squared* z-normalised Euclidean distances,
which lie in ``[0, 4m]``.

Two routes compute the same quantity:

* the reference route z-normalises both subsequences and sums squared
  differences left to right (:func:`pair_sq_dist`);
* the fast route combines a dot product with precomputed means and standard
  deviations (:func:`sq_ednorm_from_dot`).

Whenever the fast route lands too close to a threshold to be trusted, the
callers fall back to the reference route, so every engine makes identical
decisions and reports identical values.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .core import SIGMA_EPS

def znormalize(x) -> np.ndarray:
    """Shift to mean 0 and scale to (population) std 1.

    A constant input (std below ``1e-12``) maps to all zeros.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 3:
        raise ValueError("need at least 3 values to z-normalise")
    mu = x.mean()
    sigma = x.std()
    if sigma < SIGMA_EPS:
        return np.zeros_like(x)
    return (x - mu) / sigma


def sq_ed(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    d = x - y
    return float(d @ d)


@numba.njit(cache=True, nogil=True, inline="always")
def _sq_ednorm(dot, m, mu_x, mu_y, sigma_x, sigma_y):
    cx = sigma_x < SIGMA_EPS
    cy = sigma_y < SIGMA_EPS
    if cx and cy:
        return 0.0
    if cx or cy:
        return 2.0 * m
    d = 2.0 * m * (1.0 - (dot - m * mu_x * mu_y) / (m * sigma_x * sigma_y))
    if d < 0.0:
        return 0.0
    if d > 4.0 * m:
        return 4.0 * m
    return d


def sq_ednorm_from_dot(dot: float, m: int, mu_x: float, mu_y: float,
                       sigma_x: float, sigma_y: float) -> float:
    """Squared z-normalised distance from a dot product and moments.

    Clamped to ``[0, 4m]``. If exactly one subsequence is constant the
    result is ``2m``; if both are, ``0``.
    """
    if m < 3:
        raise ValueError("m must be >= 3")
    return float(_sq_ednorm(float(dot), m, float(mu_x), float(mu_y),
                            float(sigma_x), float(sigma_y)))


def early_abandon_sq_ed(xh, yh, bound: float):
    """Squared distance of two z-normalised vectors, or ``None`` once the
    running sum reaches ``bound``."""
    xh = np.asarray(xh, dtype=np.float64)
    yh = np.asarray(yh, dtype=np.float64)
    if xh.shape != yh.shape:
        raise ValueError(f"length mismatch: {xh.shape} vs {yh.shape}")
    if bound < 0:
        raise ValueError("bound must be non-negative")
    value = _early_abandon(xh, yh, float(bound))
    return None if value < 0 else value


@numba.njit(cache=True, nogil=True)
def _early_abandon(xh, yh, bound):
    # -1.0 signals abandonment
    s = 0.0
    for k in range(xh.size):
        d = xh[k] - yh[k]
        s += d * d
        if s >= bound:
            return -1.0
    return s


# --- reference route -------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _znorm_into(T, i, m, out):
    """z-normalise ``T[i:i+m]`` into ``out``; returns False for a constant."""
    s = 0.0
    for k in range(m):
        s += T[i + k]
    mean = s / m
    v = 0.0
    for k in range(m):
        d = T[i + k] - mean
        v += d * d
    sd = math.sqrt(v / m)
    if sd < SIGMA_EPS:
        for k in range(m):
            out[k] = 0.0
        return False
    for k in range(m):
        out[k] = (T[i + k] - mean) / sd
    return True


@numba.njit(cache=True, nogil=True)
def _znorm_matrix(T, m):
    N = T.size - m + 1
    Z = np.empty((N, m))
    ok = np.empty(N, dtype=np.bool_)
    for i in range(N):
        ok[i] = _znorm_into(T, i, m, Z[i])
    return Z, ok


@numba.njit(cache=True, nogil=True)
def _zrows_sq_dist(zi, ok_i, zj, ok_j, bound):
    """Reference distance between two z-normalised rows; -1.0 if abandoned."""
    m = zi.size
    if not ok_i and not ok_j:
        return 0.0 if bound > 0.0 else -1.0
    if not ok_i or not ok_j:
        return 2.0 * m if 2.0 * m < bound else -1.0
    s = 0.0
    for k in range(m):
        d = zi[k] - zj[k]
        s += d * d
        if s >= bound:
            return -1.0
    return s


@numba.njit(cache=True, nogil=True)
def _pair_sq_dist(T, i, j, m):
    # symmetric: always evaluated with the smaller start first
    if j < i:
        i, j = j, i
    zi = np.empty(m)
    zj = np.empty(m)
    ok_i = _znorm_into(T, i, m, zi)
    ok_j = _znorm_into(T, j, m, zj)
    return _zrows_sq_dist(zi, ok_i, zj, ok_j, np.inf)


def pair_sq_dist(T, i: int, j: int, m: int) -> float:
    """Reference squared z-normalised distance between two subsequences
    (0-based starts)."""
    T = np.ascontiguousarray(T, dtype=np.float64)
    return float(_pair_sq_dist(T, i, j, m))


# --- dot products ------------------------------------------------------------

@numba.njit(cache=True, nogil=True, inline="always")
def _dot(T, a, b, m):
    s = 0.0
    for k in range(m):
        s += T[a + k] * T[b + k]
    return s


def dot_products_block(q, window, m: int) -> np.ndarray:
    """Dot products of ``q`` with each ``m``-length subsequence of ``window``.

    Returns ``len(window) - m + 1`` values, computed directly.
    """
    q = np.asarray(q, dtype=np.float64)
    window = np.asarray(window, dtype=np.float64)
    if q.size != m:
        raise ValueError(f"query has length {q.size}, expected {m}")
    if window.size < m:
        raise ValueError("window shorter than the subsequence length")
    views = np.lib.stride_tricks.sliding_window_view(window, m)
    return views @ q


def update_dot_col(prev_col, row, k: int, segment, chunk, m: int) -> np.ndarray:
    """Advance a column of dot products by one chunk position, in O(1) each.

    ``prev_col[t]`` holds ``segment[t:t+m] . chunk[k-2 : k-2+m]`` (``k`` is the
    1-based chunk ordinal being produced) and ``row[k-1]`` holds
    ``segment[0:m] . chunk[k-1 : k-1+m]``. Entry ``t > 0`` of the result reuses
    ``prev_col[t-1]``, adding the newest product and dropping the oldest.
    """
    prev_col = np.asarray(prev_col, dtype=np.float64)
    row = np.asarray(row, dtype=np.float64)
    segment = np.asarray(segment, dtype=np.float64)
    chunk = np.asarray(chunk, dtype=np.float64)
    seg_n = prev_col.size
    if not 1 < k <= row.size:
        raise ValueError(f"chunk ordinal {k} out of range 2..{row.size}")
    if segment.size < seg_n + m - 1 or chunk.size < k + m - 1:
        raise ValueError("segment or chunk too short")
    b = k - 1  # 0-based start of the chunk subsequence
    col = np.empty(seg_n)
    t = np.arange(1, seg_n)
    col[1:] = prev_col[:-1] + segment[t + m - 1] * chunk[b + m - 1] - segment[t - 1] * chunk[b - 1]
    col[0] = row[k - 1]
    return col
