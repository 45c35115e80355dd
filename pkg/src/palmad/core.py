"""Domain types and segmentation arithmetic shared across the package.

Public indices are 1-based (``i`` in ``1..n-m+1``); arrays inside the
kernels are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

#: Standard deviations below this are treated as constant subsequences.
SIGMA_EPS = 1e-12


class SubseqIndex(NamedTuple):
    """Start position (1-based) and length of a subsequence."""

    i: int
    m: int


def check_length(n: int, m: int) -> None:
    """Raise ``ValueError`` unless ``3 <= m <= n // 2``."""
    if m < 3:
        raise ValueError(f"subsequence length must be >= 3, got {m}")
    if 2 * m > n:
        raise ValueError(f"subsequence length {m} too long for series of length {n} (need m <= n/2)")


def check_index(index: SubseqIndex, n: int) -> None:
    i, m = index
    if m < 3 or not 1 <= i <= n - m + 1:
        raise ValueError(f"invalid subsequence {index!r} for series of length {n}")


@dataclass(frozen=True)
class TimeSeries:
    """A finite real-valued series, optionally padded on the right.

    ``values`` holds only the real data. Padding is never stored as data;
    :attr:`padded` materialises it as ``+inf`` and :attr:`pad_mask` flags it.
    """

    values: np.ndarray
    pad_count: int = 0

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ValueError("time series must be one-dimensional")
        if values.size < 3:
            raise ValueError(f"time series needs at least 3 values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise ValueError("time series contains non-finite values")
        if self.pad_count < 0:
            raise ValueError("pad_count must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.n

    def with_padding(self, pad_count: int) -> "TimeSeries":
        return TimeSeries(self.values, pad_count)

    @property
    def padded(self) -> np.ndarray:
        return np.concatenate([self.values, np.full(self.pad_count, np.inf)])

    @property
    def pad_mask(self) -> np.ndarray:
        mask = np.zeros(self.n + self.pad_count, dtype=bool)
        mask[self.n:] = True
        return mask


def as_series(data) -> TimeSeries:
    if isinstance(data, TimeSeries):
        return data
    return TimeSeries(np.asarray(data, dtype=np.float64))


@dataclass(frozen=True)
class SegmentLayout:
    """How the series is cut into equal segments for one subsequence length.

    Segment ``j`` (0-based) owns candidates ``j*seg_n + 1 .. (j+1)*seg_n``
    (1-based); neighbouring segments share ``m - 1`` elements.
    """

    n: int
    m: int
    seglen: int
    seg_n: int
    num_seg: int
    pad: int

    @property
    def num_subseq(self) -> int:
        """N = n - m + 1, the count of real subsequences."""
        return self.n - self.m + 1

    @property
    def padded_count(self) -> int:
        """N' = num_seg * seg_n, the candidate count including padding."""
        return self.num_seg * self.seg_n

    def segment_range(self, j: int) -> tuple[int, int]:
        """1-based inclusive candidate range owned by segment ``j``."""
        if not 0 <= j < self.num_seg:
            raise IndexError(j)
        return j * self.seg_n + 1, (j + 1) * self.seg_n


def compute_layout(n: int, m: int, seglen: int) -> SegmentLayout:
    """Segment geometry and right padding for length ``m``.

    >>> compute_layout(100, 10, 32)
    SegmentLayout(n=100, m=10, seglen=32, seg_n=23, num_seg=4, pad=10)
    """
    if m < 3:
        raise ValueError(f"subsequence length must be >= 3, got {m}")
    if m > n - 2:
        raise ValueError(f"subsequence length {m} too long for series of length {n}")
    if seglen <= m:
        raise ValueError(f"segment length {seglen} must exceed subsequence length {m}")
    if n < seglen:
        raise ValueError(f"series length {n} shorter than segment length {seglen}")
    seg_n = seglen - m + 1
    N = n - m + 1
    num_seg = -(-N // seg_n)
    if N % seg_n == 0:
        pad = m - 1
    else:
        pad = num_seg * seg_n + 2 * (m - 1) - n
    return SegmentLayout(n=n, m=m, seglen=seglen, seg_n=seg_n, num_seg=num_seg, pad=pad)


def non_self_match(i: int, j: int, m: int) -> bool:
    return abs(i - j) >= m


@dataclass(frozen=True, order=False)
class DiscordRecord:
    """A range discord of a given length, with its squared nn distance.

    ``index`` is the 1-based start.

    ``neighbor`` is the 1-based start of the nearest non-self match.
    """

    index: int
    length: int
    nn_dist_sq: float
    neighbor: int = 0

    @property
    def nn_dist(self) -> float:
        return math.sqrt(self.nn_dist_sq)

    @property
    def subseq(self) -> SubseqIndex:
        return SubseqIndex(self.index, self.length)

    @property
    def score(self) -> float:
        return self.nn_dist_sq / (2 * self.length)


def sort_records(records) -> list[DiscordRecord]:
    """Descending by squared distance, ties to the lower start index."""
    return sorted(records, key=lambda r: (-r.nn_dist_sq, r.index))


@dataclass
class MultiLengthDiscordSet:
    """Discords for every length in ``min_length..max_length``."""

    min_length: int
    max_length: int
    per_length: dict[int, list[DiscordRecord]] = field(default_factory=dict)
    failed: list[int] = field(default_factory=list)
    thresholds: dict[int, float] = field(default_factory=dict)

    def __iter__(self):
        for m in sorted(self.per_length):
            yield from self.per_length[m]

    def __len__(self) -> int:
        return sum(len(v) for v in self.per_length.values())

    def lengths(self) -> list[int]:
        return list(range(self.min_length, self.max_length + 1))
