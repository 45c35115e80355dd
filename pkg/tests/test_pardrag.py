import threading

import numpy as np
import numpy.testing as npt
import pytest

from palmad.core import compute_layout
from palmad.drag import brute_force_nn, brute_force_topk, drag
from palmad.pardrag import SelectionState, conjoin_bitmaps, par_refine, par_select, pardrag
from palmad.stats import init_stats


def random_walk(n, seed):
    rng = np.random.default_rng(seed)
    return np.concatenate(([0.0], np.cumsum(rng.standard_normal(n - 1))))


def as_pairs(records):
    return [(r.index, r.nn_dist_sq) for r in records]


def test_fresh_state_excludes_padding():
    lay = compute_layout(100, 10, 32)
    st = SelectionState.fresh(lay)
    assert st.cand.size == lay.padded_count == 92
    assert st.cand[:91].all() and not st.cand[91:].any()
    assert st.neighbor[:91].all() and not st.neighbor[91:].any()
    assert np.isinf(st.nn_dist_sq).all()


def test_select_at_zero_prunes_nothing():
    T = random_walk(300, 0)
    m = 9
    lay = compute_layout(300, m, 40)
    st = par_select(T, m, 0.0, init_stats(T, m), lay)
    N = lay.num_subseq
    assert st.cand[:N].all() and st.neighbor[:N].all()
    # with nothing pruned every pair is visited once, and both ends record it
    npt.assert_allclose(st.nn_dist_sq[:N], brute_force_nn(T, m), rtol=1e-7)


def test_select_above_max_distance():
    # only subsequences with no admissible partner to their right survive
    T = random_walk(40, 1)
    m = 4
    lay = compute_layout(40, m, 8)
    st = par_select(T, m, 4 * m + 1.0, init_stats(T, m), lay)
    assert set(np.flatnonzero(st.cand) + 1) == {34, 35, 36, 37}


def test_conjoin_bitmaps():
    lay = compute_layout(50, 5, 12)
    st = SelectionState.fresh(lay)
    assert conjoin_bitmaps(st).cand[:46].all()
    st.neighbor[:] = False
    assert not conjoin_bitmaps(st).cand.any()
    assert st.cand[:46].all()  # the input is left alone
    rng = np.random.default_rng(2)
    st.cand[:] = rng.random(st.cand.size) < 0.5
    st.neighbor[:] = rng.random(st.cand.size) < 0.5
    npt.assert_array_equal(conjoin_bitmaps(st).cand, st.cand & st.neighbor)


def test_refine_without_candidates():
    T = random_walk(100, 3)
    lay = compute_layout(100, 5, 20)
    st = SelectionState.fresh(lay)
    st.cand[:] = False
    assert par_refine(T, 5, 1.0, None, lay, st) == []


def test_top1_just_below():
    T = random_walk(1500, 4)
    m = 16
    top = brute_force_topk(T, m, 1)[0]
    got = pardrag(T, m, top.nn_dist_sq * (1 - 1e-9), seglen=64)
    assert [r.index for r in got] == [top.index]
    assert got[0].nn_dist_sq == pytest.approx(top.nn_dist_sq, rel=1e-7)


@pytest.mark.parametrize("seed", range(10))
def test_pipeline_equals_drag(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(200, 3000))
    m = int(rng.choice([8, 16, 32]))
    seglen = int(rng.choice([s for s in (16, 32, 64) if s > m]))
    T = random_walk(n, seed)
    nn = brute_force_nn(T, m)
    for q in (50, 90, 100):
        r_sq = float(np.percentile(nn, q))
        assert as_pairs(pardrag(T, m, r_sq, seglen=seglen)) == as_pairs(drag(T, m, r_sq))


@pytest.mark.parametrize("seed", range(4))
def test_schedule_independence(seed):
    T = random_walk(1200, 100 + seed)
    m = 11
    r_sq = float(np.percentile(brute_force_nn(T, m), 90))
    ref = as_pairs(pardrag(T, m, r_sq, seglen=40, workers=1))
    for workers in (2, 4, 8, 8):
        assert as_pairs(pardrag(T, m, r_sq, seglen=40, workers=workers)) == ref


def test_early_exit_does_not_change_results():
    T = random_walk(900, 7)
    m = 10
    nn = brute_force_nn(T, m)
    for q in (10, 80, 99):
        r_sq = float(np.percentile(nn, q))
        a = pardrag(T, m, r_sq, seglen=30, early_exit=True)
        b = pardrag(T, m, r_sq, seglen=30, early_exit=False)
        assert as_pairs(a) == as_pairs(b)


def test_empty_above_max_distance():
    T = random_walk(500, 5)
    assert pardrag(T, 8, 4 * 8 + 1e-9, seglen=64, workers=4) == []


def test_constant_stretch():
    T = random_walk(400, 6)
    T[100:160] = 3.0
    T[250:300] = -1.0
    m = 8
    nn = brute_force_nn(T, m)
    for q in (20, 60, 95):
        r_sq = float(np.percentile(nn, q))
        assert as_pairs(pardrag(T, m, r_sq, seglen=24, workers=3)) == as_pairs(drag(T, m, r_sq))


def test_lower_hammered_from_many_threads():
    lay = compute_layout(100, 5, 20)
    st = SelectionState.fresh(lay)
    rng = np.random.default_rng(0)
    values = rng.random((8, 2000))
    partners = rng.integers(0, 90, size=(8, 2000))
    barrier = threading.Barrier(8)

    def hammer(w):
        barrier.wait()
        for v, p in zip(values[w], partners[w]):
            st.lower(17, float(v), int(p))
            st.clear_cand(int(p))

    threads = [threading.Thread(target=hammer, args=(w,)) for w in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    flat_v, flat_p = values.ravel(), partners.ravel()
    best = flat_v.min()
    assert st.nn_dist_sq[17] == best
    assert st.nn_index[17] == flat_p[flat_v == best].min()
    assert not st.cand[np.unique(flat_p)].any()


def test_merge_is_order_free():
    lay = compute_layout(60, 4, 16)
    rng = np.random.default_rng(1)
    bufs = []
    for _ in range(5):
        nb, nn, idx = SelectionState.fresh(lay).private_buffers()
        nb[:] = rng.random(nb.size) < 0.8
        nn[:] = np.round(rng.random(nn.size), 1)  # force ties
        idx[:] = rng.integers(0, 57, nn.size)
        bufs.append((nb, nn, idx))
    results = []
    for order in ([0, 1, 2, 3, 4], [4, 2, 0, 3, 1]):
        st = SelectionState.fresh(lay)
        for k in order:
            st.merge(*bufs[k])
        results.append(st)
    a, b = results
    npt.assert_array_equal(a.neighbor, b.neighbor)
    npt.assert_array_equal(a.nn_dist_sq, b.nn_dist_sq)
    npt.assert_array_equal(a.nn_index, b.nn_index)


def test_rejects_negative_threshold():
    with pytest.raises(ValueError):
        pardrag(random_walk(100, 0), 5, -1.0)
