"""Rolling means and standard deviations of all subsequences of one length.

The vectors are sized for the shortest length of a run (``n - minL + 1``)
and only the first ``n - m + 1`` entries are meaningful at length ``m``;
the tail is left as-is, nothing reads it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .core import TimeSeries, as_series


@dataclass(frozen=True)
class RollingStats:
    m: int
    mu: np.ndarray
    sigma: np.ndarray
    valid_count: int
    advances: int = 0  # recurrence steps since the last direct computation

    @property
    def valid_mu(self) -> np.ndarray:
        return self.mu[: self.valid_count]

    @property
    def valid_sigma(self) -> np.ndarray:
        return self.sigma[: self.valid_count]


@numba.njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bp = s - a
    err = (a - (s - bp)) + (b - bp)
    return s, err


@numba.njit(cache=True)
def _rolling_moments(x, m, mu, var):
    # Sliding sums of x and x^2, each carried with a compensation term so the
    # add/subtract stream does not drift over long series.
    N = x.size - m + 1
    s1 = 0.0
    c1 = 0.0
    s2 = 0.0
    c2 = 0.0
    for k in range(m):
        s1, e = _two_sum(s1, x[k])
        c1 += e
        s2, e = _two_sum(s2, x[k] * x[k])
        c2 += e
    for i in range(N):
        if i > 0:
            old = x[i - 1]
            new = x[i + m - 1]
            s1, e = _two_sum(s1, new)
            c1 += e
            s1, e = _two_sum(s1, -old)
            c1 += e
            s2, e = _two_sum(s2, new * new)
            c2 += e
            s2, e = _two_sum(s2, -(old * old))
            c2 += e
        mean = (s1 + c1) / m
        mu[i] = mean
        v = (s2 + c2) / m - mean * mean
        var[i] = v if v > 0.0 else 0.0


def init_stats(T, m: int, size: int | None = None) -> RollingStats:
    """Means and standard deviations of every ``m``-length subsequence.

    One running-sum pass over the series. ``size`` reserves room for shorter
    lengths (``n - minL + 1``); it defaults to ``n - m + 1``.
    """
    series = as_series(T)
    n = series.n
    # moments are well defined for any window; searches check lengths themselves
    if not 1 <= m <= n:
        raise ValueError(f"invalid window length {m} for series of length {n}")
    N = n - m + 1
    size = N if size is None else size
    if size < N:
        raise ValueError(f"size {size} smaller than subsequence count {N}")
    # centring keeps the x^2 sums small; z-normalised quantities do not care
    shift = float(np.mean(series.values))
    x = series.values - shift
    mu = np.zeros(size)
    var = np.zeros(size)
    _rolling_moments(x, m, mu, var)
    mu[:N] += shift
    return RollingStats(m=m, mu=mu, sigma=np.sqrt(var), valid_count=N)


def advance_stats(s: RollingStats, T: TimeSeries) -> RollingStats:
    """Stats for length ``m + 1`` from those for ``m``, one update per index.

    mu' = (m mu + t[i+m]) / (m+1)
    var' = m/(m+1) * (var + (mu - t[i+m])^2 / (m+1))
    """
    series = as_series(T)
    m = s.m
    if m + 1 > series.n:
        raise ValueError(f"cannot advance beyond length {m}")
    N = series.n - m
    t_next = series.values[m : m + N]
    mu_old = s.mu[:N]
    var_old = s.sigma[:N] ** 2
    mu = s.mu.copy()
    sigma = s.sigma.copy()
    mu[:N] = (m * mu_old + t_next) / (m + 1)
    var = m / (m + 1) * (var_old + (mu_old - t_next) ** 2 / (m + 1))
    sigma[:N] = np.sqrt(var)
    return RollingStats(m=m + 1, mu=mu, sigma=sigma, valid_count=N, advances=s.advances + 1)
