import math

import numpy as np
import numpy.testing as npt
import pytest

from palmad.stats import advance_stats, init_stats


def naive_stats(T, m):
    windows = np.lib.stride_tricks.sliding_window_view(np.asarray(T, dtype=float), m)
    return windows.mean(axis=1), windows.std(axis=1)


def test_init_stats_small_examples():
    s = init_stats([1.0, 2.0, 3.0, 4.0], 2)
    npt.assert_allclose(s.valid_mu, [1.5, 2.5, 3.5])
    npt.assert_allclose(s.valid_sigma, [0.5, 0.5, 0.5])

    s = init_stats([1.0, 2.0, 3.0, 4.0], 3)
    npt.assert_allclose(s.valid_mu, [2.0, 3.0])
    npt.assert_allclose(s.valid_sigma, [math.sqrt(2 / 3)] * 2)


def test_init_stats_constant_series():
    s = init_stats(np.full(50, 7.25), 6)
    npt.assert_array_equal(s.valid_mu, 7.25)
    npt.assert_array_equal(s.valid_sigma, 0.0)


def test_init_stats_rejects_bad_length():
    with pytest.raises(ValueError):
        init_stats(np.arange(10.0), 11)
    with pytest.raises(ValueError):
        init_stats(np.arange(10.0), 0)
    with pytest.raises(ValueError):
        init_stats(np.arange(10.0), 4, size=3)


def test_init_stats_reserves_room():
    s = init_stats(np.arange(10.0), 4, size=8)
    assert s.mu.size == 8
    assert s.valid_count == 7


def test_advance_small_example():
    T = [1.0, 2.0, 3.0, 4.0]
    s = advance_stats(init_stats(T, 2), T)
    assert s.m == 3
    assert s.advances == 1
    npt.assert_allclose(s.valid_mu, [2.0, 3.0])
    # (2/3) * (0.25 + (1.5 - 3)^2 / 3) = 2/3
    npt.assert_allclose(s.valid_sigma, [math.sqrt(2 / 3)] * 2)


def test_advance_keeps_constant_sigma_zero():
    T = np.full(40, -3.5)
    s = init_stats(T, 4)
    for _ in range(10):
        s = advance_stats(s, T)
    npt.assert_array_equal(s.valid_sigma, 0.0)
    npt.assert_array_equal(s.valid_mu, -3.5)


def test_advance_refuses_to_overrun():
    T = np.arange(10.0)
    s = init_stats(T, 10)
    with pytest.raises(ValueError):
        advance_stats(s, T)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_repeated_advance_matches_direct(seed):
    rng = np.random.default_rng(seed)
    T = np.cumsum(rng.standard_normal(3000))
    s = init_stats(T, 8, size=3000 - 8 + 1)
    for m in range(9, 200):
        s = advance_stats(s, T)
        if m % 17 == 0 or m == 199:
            mu, sigma = naive_stats(T, m)
            npt.assert_allclose(s.valid_mu, mu, rtol=0, atol=1e-9)
            npt.assert_allclose(s.valid_sigma, sigma, rtol=0, atol=1e-9)
            assert (s.valid_sigma >= 0).all()


def test_init_stats_matches_naive_on_offset_data():
    # a large offset is where plain running sums lose digits
    rng = np.random.default_rng(3)
    T = 1e6 + rng.standard_normal(5000)
    s = init_stats(T, 32)
    mu, sigma = naive_stats(T, 32)
    npt.assert_allclose(s.valid_mu, mu, rtol=0, atol=1e-9)
    npt.assert_allclose(s.valid_sigma, sigma, rtol=0, atol=1e-7)
