import math

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from palmad.distance import (
    dot_products_block,
    early_abandon_sq_ed,
    pair_sq_dist,
    sq_ed,
    sq_ednorm_from_dot,
    update_dot_col,
    znormalize,
)


def test_znormalize_small():
    npt.assert_allclose(znormalize([1.0, 2.0, 3.0]), [-math.sqrt(1.5), 0.0, math.sqrt(1.5)])


def test_znormalize_constant_is_zero():
    npt.assert_array_equal(znormalize([5.0, 5.0, 5.0]), [0.0, 0.0, 0.0])


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(3, 64), elements=st.floats(-1e3, 1e3)))
def test_znormalize_idempotent(x):
    z = znormalize(x)
    npt.assert_allclose(znormalize(z), z, atol=1e-9)


def test_sq_ed():
    assert sq_ed([0.0, 0.0], [3.0, 4.0]) == 25.0
    assert sq_ed([1.0], [1.0]) == 0.0
    x = np.arange(7.0)
    assert sq_ed(x, x) == 0.0
    with pytest.raises(ValueError):
        sq_ed([1.0, 2.0], [1.0])


def test_sq_ednorm_anticorrelated():
    # X=[1,2,3], Y=[3,2,1]: dot=10, both means 2, both variances 2/3
    s = math.sqrt(2 / 3)
    assert sq_ednorm_from_dot(10.0, 3, 2.0, 2.0, s, s) == pytest.approx(12.0, abs=1e-12)


def test_sq_ednorm_identical():
    x = np.array([4.0, -1.0, 2.5, 7.0])
    d = sq_ednorm_from_dot(x @ x, 4, x.mean(), x.mean(), x.std(), x.std())
    assert d == pytest.approx(0.0, abs=1e-12)


def test_sq_ednorm_constant_conventions():
    assert sq_ednorm_from_dot(12.0, 4, 1.0, 3.0, 0.0, 2.0) == 8.0
    assert sq_ednorm_from_dot(12.0, 4, 1.0, 3.0, 0.0, 0.0) == 0.0


@pytest.mark.parametrize("seed", range(10))
def test_sq_ednorm_matches_normalised_ed(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 200))
    x = rng.normal(rng.normal(0, 50), rng.uniform(0.1, 20), m)
    y = rng.normal(rng.normal(0, 50), rng.uniform(0.1, 20), m)
    fast = sq_ednorm_from_dot(x @ y, m, x.mean(), y.mean(), x.std(), y.std())
    ref = sq_ed(znormalize(x), znormalize(y))
    assert fast == pytest.approx(ref, rel=1e-7)
    back = sq_ednorm_from_dot(y @ x, m, y.mean(), x.mean(), y.std(), x.std())
    assert abs(fast - back) < 1e-9
    assert 0.0 <= fast <= 4 * m


def test_early_abandon():
    rng = np.random.default_rng(0)
    xh, yh = znormalize(rng.normal(size=30)), znormalize(rng.normal(size=30))
    full = sq_ed(xh, yh)
    assert early_abandon_sq_ed(xh, yh, np.inf) == pytest.approx(full, abs=1e-9)
    assert early_abandon_sq_ed(xh, yh, full + 1.0) == pytest.approx(full, abs=1e-9)
    assert early_abandon_sq_ed(xh, yh, full) is None
    # equal vectors still abandon at a zero bound: 0 >= 0
    assert early_abandon_sq_ed(xh, xh, 0.0) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 200.0))
def test_early_abandon_never_reaches_bound(seed, bound):
    rng = np.random.default_rng(seed)
    xh, yh = znormalize(rng.normal(size=25)), znormalize(rng.normal(size=25))
    value = early_abandon_sq_ed(xh, yh, bound)
    assert value is None or value < bound


def test_pair_sq_dist_reference():
    T = np.array([1.0, 2.0, 3.0, 3.0, 2.0, 1.0])
    assert pair_sq_dist(T, 0, 3, 3) == pytest.approx(12.0, abs=1e-12)
    assert pair_sq_dist(T, 3, 0, 3) == pair_sq_dist(T, 0, 3, 3)
    flat = np.array([2.0, 2.0, 2.0, 1.0, 5.0, 3.0, 2.0, 2.0, 2.0])
    assert pair_sq_dist(flat, 0, 3, 3) == 6.0
    assert pair_sq_dist(flat, 0, 6, 3) == 0.0


def test_dot_products_block():
    q = np.zeros(4)
    npt.assert_array_equal(dot_products_block(q, np.arange(10.0), 4), np.zeros(7))
    w = np.array([1.0, 2.0, 3.0])
    npt.assert_array_equal(dot_products_block(w, w, 3), [14.0])
    rng = np.random.default_rng(1)
    q, w = rng.normal(size=16), rng.normal(size=80)
    direct = [sum(q[k] * w[t + k] for k in range(16)) for t in range(65)]
    npt.assert_allclose(dot_products_block(q, w, 16), direct, rtol=0, atol=1e-9)


def _sweep(segment, chunk, m, seg_n):
    """Every column of dot products between segment and chunk subsequences,
    produced by the recurrence from the first column and the first row."""
    n_chunk = chunk.size - m + 1
    row = dot_products_block(segment[:m], chunk, m)
    col = dot_products_block(chunk[:m], segment[: seg_n + m - 1], m)
    cols = [col]
    for k in range(2, n_chunk + 1):
        col = update_dot_col(col, row, k, segment, chunk, m)
        cols.append(col)
    return np.array(cols)


def _direct(segment, chunk, m, seg_n):
    S = np.lib.stride_tricks.sliding_window_view(segment[: seg_n + m - 1], m)
    C = np.lib.stride_tricks.sliding_window_view(chunk, m)
    return C @ S.T


def test_update_dot_col_zero_and_constant():
    m, seg_n = 5, 6
    z = np.zeros(seg_n + m - 1)
    npt.assert_array_equal(_sweep(z, z, m, seg_n), 0.0)
    c = np.full(seg_n + m - 1, 1.5)
    npt.assert_array_equal(_sweep(c, c, m, seg_n), m * 1.5 * 1.5)


@pytest.mark.parametrize("seed", range(5))
def test_update_dot_col_sweep_matches_direct(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 300))
    seg_n = int(rng.integers(1, 200))
    segment = rng.uniform(-1e3, 1e3, seg_n + m - 1)
    chunk = rng.uniform(-1e3, 1e3, seg_n + m - 1)
    got = _sweep(segment, chunk, m, seg_n)
    want = _direct(segment, chunk, m, seg_n)
    assert np.max(np.abs(got - want)) / np.max(np.abs(want)) < 1e-8


def test_update_dot_col_checks_ordinal():
    seg = np.arange(10.0)
    with pytest.raises(ValueError):
        update_dot_col(np.zeros(6), np.zeros(6), 1, seg, seg, 5)
