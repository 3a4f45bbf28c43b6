import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avalign.align import (
    KERNELS,
    AlignmentPath,
    WarpFunction,
    accumulated_cost,
    brute_force_align,
    dijkstra_align,
    global_offset,
    node_weights,
    offset_warp,
    path_cost,
    path_to_warp,
)
from avalign.cost import BandError, CostMatrix, band_connects

from oracles import relaxation_cost


def cm(values, radius=None):
    return CostMatrix(np.asarray(values, dtype=np.float64), radius)


def banded(rng, n, m, radius):
    v = rng.normal(size=(n, m))
    j = np.arange(m)[None, :]
    i = np.arange(n)[:, None]
    v[np.abs(j - i * (m - 1) / max(n - 1, 1)) > radius + 1e-9] = np.inf
    return cm(v, radius)


def assert_valid_path(pairs, c):
    pairs = np.asarray(pairs)
    n, m = c.shape
    assert tuple(pairs[0]) == (0, 0) and tuple(pairs[-1]) == (n - 1, m - 1)
    steps = {tuple(s) for s in np.diff(pairs, axis=0)}
    assert steps <= {(1, 1), (0, 1), (1, 0)}
    assert np.all(np.isfinite(c.values[pairs[:, 0], pairs[:, 1]]))


def test_single_cell(backend):
    p = dijkstra_align(cm([[3.5]]), backend=backend)
    assert p.pairs.tolist() == [[0, 0]] and p.total_cost == 3.5
    assert brute_force_align(cm([[3.5]])).pairs.tolist() == [[0, 0]]


def test_zero_diagonal(backend):
    v = np.ones((3, 3)) - np.eye(3)
    p = dijkstra_align(cm(v), backend=backend)
    assert p.pairs.tolist() == [[0, 0], [1, 1], [2, 2]] and p.total_cost == 0


def test_zero_matrix_tie_goes_diagonal(backend):
    assert dijkstra_align(cm(np.zeros((2, 2))), backend=backend).pairs.tolist() == [[0, 0], [1, 1]]
    assert brute_force_align(cm(np.zeros((2, 2)))).pairs.tolist() == [[0, 0], [1, 1]]


def test_tie_prefers_01_over_10():
    # diagonal blocked by a high cost: both detours cost 0
    v = np.array([[0.0, 0.0, 9.0], [0.0, 9.0, 0.0], [9.0, 0.0, 0.0]])
    p = dijkstra_align(cm(v))
    b = brute_force_align(cm(v))
    assert p.pairs.tolist() == b.pairs.tolist()
    # the last step walking back is (0, 1): from (2, 1) to (2, 2)
    assert p.pairs[-2].tolist() == [2, 1]


@pytest.mark.parametrize("delay_bias", [False, True])
@pytest.mark.parametrize("axis", ["reference", "unaligned"])
def test_dijkstra_equals_brute_force_random(delay_bias, axis):
    rng = np.random.default_rng(2024)
    for _ in range(150):
        n, m = rng.integers(1, 9), rng.integers(1, 8)
        c = cm(rng.normal(size=(n, m)))
        d = dijkstra_align(c, delay_bias, delay_axis=axis)
        b = brute_force_align(c, delay_bias, delay_axis=axis)
        assert d.total_cost == b.total_cost
        assert_valid_path(d.pairs, c)
        assert path_cost(c, d.pairs, delay_bias, delay_axis=axis) == d.total_cost


@pytest.mark.parametrize("delay_bias", [False, True])
def test_integer_costs_same_path_as_brute_force(delay_bias):
    # integer weights make every sum exact, so the tie-break must agree too
    rng = np.random.default_rng(5)
    for _ in range(150):
        n, m = rng.integers(1, 8), rng.integers(1, 8)
        c = cm(rng.integers(0, 3, size=(n, m)) * 4.0)
        d = dijkstra_align(c, delay_bias)
        b = brute_force_align(c, delay_bias)
        assert d.pairs.tolist() == b.pairs.tolist()


def test_banded_small_against_brute_force():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n, m = rng.integers(2, 10), rng.integers(2, 10)
        radius = float(rng.integers(1, 4))
        c = banded(rng, n, m, radius)
        if not band_connects(*c.limits(), m):
            continue
        for bias in (False, True):
            d = dijkstra_align(c, bias)
            assert d.total_cost == brute_force_align(c, bias).total_cost
            assert_valid_path(d.pairs, c)


def test_banded_20x20_against_relaxation():
    rng = np.random.default_rng(11)
    for _ in range(30):
        c = banded(rng, 20, 20, float(rng.integers(1, 6)))
        for bias in (False, True):
            assert dijkstra_align(c, bias).total_cost == relaxation_cost(c.values, bias)


def test_backends_bit_identical():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n, m = rng.integers(1, 40), rng.integers(1, 40)
        if rng.random() < 0.5:
            c = banded(rng, n, n, float(rng.integers(1, 8)))
        else:
            c = cm(rng.normal(size=(n, m)))
        for bias in (False, True):
            outs = [accumulated_cost(c, bias, backend=b) for b in sorted(KERNELS)]
            for D, back in outs[1:]:
                assert D.tobytes() == outs[0][0].tobytes()
                assert back.tobytes() == outs[0][1].tobytes()


def test_cython_backend_is_built():
    assert "cython" in KERNELS


def test_heap_matches_sweep_on_nonnegative():
    rng = np.random.default_rng(4)
    for _ in range(50):
        c = cm(rng.uniform(0, 1, size=(rng.integers(1, 12), rng.integers(1, 12))))
        for bias in (False, True):
            h = dijkstra_align(c, bias, method="heap")
            s = dijkstra_align(c, bias)
            assert h.total_cost == pytest.approx(s.total_cost, abs=1e-12)
            assert_valid_path(h.pairs, c)


def test_heap_rejects_negative_weights():
    with pytest.raises(ValueError, match="non-negative"):
        dijkstra_align(cm([[0.0, -1.0], [1.0, 0.0]]), method="heap")


def test_disconnected_band():
    v = np.full((2, 20), np.inf)
    v[0, 0] = v[1, 19] = 0.0
    with pytest.raises(BandError):
        dijkstra_align(cm(v, 0.5))
    with pytest.raises(BandError):
        brute_force_align(cm(v, 0.5))


def test_brute_force_size_limit():
    with pytest.raises(ValueError, match="24"):
        brute_force_align(cm(np.zeros((13, 12))))


def test_banded_equals_full_when_optimum_inside():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = 30
        v = rng.uniform(1, 2, size=(n, n))
        v[np.arange(n), np.arange(n)] = 0.0
        full = dijkstra_align(cm(v))
        mask = np.abs(np.arange(n)[None, :] - np.arange(n)[:, None]) <= 3
        band = dijkstra_align(cm(np.where(mask, v, np.inf), 3.0))
        assert band.pairs.tolist() == full.pairs.tolist()
        assert band.total_cost == full.total_cost


def test_scaling_leaves_path_unchanged():
    rng = np.random.default_rng(8)
    for _ in range(50):
        v = rng.integers(0, 5, size=(rng.integers(2, 9), rng.integers(2, 9))).astype(float)
        base = dijkstra_align(cm(v)).pairs.tolist()
        for alpha in (0.5, 2.0, 8.0):
            assert dijkstra_align(cm(alpha * v)).pairs.tolist() == base


def test_adding_constant_can_change_path():
    # paths visit different numbers of nodes, so a constant offset reweights them
    v = np.array([[0.0, -1.0], [-1.0, 0.0]])
    assert dijkstra_align(cm(v)).pairs.tolist() == [[0, 0], [1, 0], [1, 1]]
    assert dijkstra_align(cm(v + 1.0)).pairs.tolist() == [[0, 0], [1, 1]]


def test_node_weights_boundary_rule():
    c = np.arange(12, dtype=float).reshape(4, 3)
    w = node_weights(c, True, "unaligned")
    np.testing.assert_array_equal(w[0], c[0])
    np.testing.assert_allclose(w[1], 2 / 3 * c[1] + 1 / 3 * c[0])
    np.testing.assert_allclose(w[3], 0.5 * c[3] + 0.25 * c[2] + 0.25 * c[1])
    np.testing.assert_array_equal(node_weights(c, True, "reference"), node_weights(c.T, True, "unaligned").T)
    np.testing.assert_array_equal(node_weights(c, False), c)


def test_node_weights_drop_out_of_band_predecessors():
    c = np.array([[1.0, 2.0], [np.inf, 4.0], [np.inf, 8.0]])
    w = node_weights(c, True, "unaligned")
    assert w[1, 1] == pytest.approx(2 / 3 * 4 + 1 / 3 * 2)
    assert w[2, 1] == pytest.approx(0.5 * 8 + 0.25 * 4 + 0.25 * 2)
    assert np.isinf(w[1, 0]) and np.isinf(w[2, 0])


def two_route_matrix(n=8):
    """Zero-cost routes one frame above and one below the diagonal, mirror images."""
    v = np.ones((n, n))
    v[0, 0] = v[n - 1, n - 1] = 0.0
    for i in range(n - 1):
        v[i, i + 1] = 0.0  # audio frame i shown at video frame i+1: audio lags
        v[i + 1, i] = 0.0  # audio leads
    return v


def lag_route(n=8):
    return [[0, 0]] + [[i, i + 1] for i in range(n - 1)] + [[n - 1, n - 1]]


def lead_route(n=8):
    return [[0, 0]] + [[i + 1, i] for i in range(n - 1)] + [[n - 1, n - 1]]


def test_delay_bias_selects_lagging_route():
    c = cm(two_route_matrix())
    assert path_cost(c, lag_route()) == path_cost(c, lead_route()) == 0.0
    off = dijkstra_align(c, delay_bias=False)
    on = dijkstra_align(c, delay_bias=True)
    assert off.pairs.tolist() == brute_force_align(c, False).pairs.tolist() == lead_route()
    assert on.pairs.tolist() == brute_force_align(c, True).pairs.tolist() == lag_route()
    assert on.total_cost == brute_force_align(c, True).total_cost
    # lagging route: source time trails reference time
    warp = path_to_warp(on, 0.04, 0.04)
    assert np.all(warp.source_times[1:-1] < warp.ref_times[1:-1])


def test_delay_bias_on_unaligned_axis_mirrors():
    c = cm(two_route_matrix())
    assert dijkstra_align(c, True, delay_axis="unaligned").pairs.tolist() == lead_route()


def test_path_json_round_trip():
    p = AlignmentPath(np.array([[0, 0], [1, 1]]), 1.5)
    data = json.loads(p.to_json())
    assert data == {"pairs": [[0, 0], [1, 1]], "total_cost": 1.5}
    back = AlignmentPath.from_json(p.to_json())
    assert back.pairs.tolist() == [[0, 0], [1, 1]] and back.total_cost == 1.5


def test_global_offset_examples():
    n = 12
    v = np.ones((n, n))
    v[np.arange(n - 2), np.arange(2, n)] = 0.0
    assert global_offset(cm(v)) == 2
    assert global_offset(cm(np.ones((n, n)) - np.eye(n))) == 0


def test_global_offset_matches_scan():
    rng = np.random.default_rng(12)
    for _ in range(30):
        v = rng.normal(size=(20, 20))
        best, best_k = np.inf, None
        for k in range(-19, 20):
            diag = [v[i, i + k] for i in range(20) if 0 <= i + k < 20]
            mean = sum(diag) / len(diag)
            if mean < best - 1e-12:
                best, best_k = mean, k
        assert global_offset(cm(v)) == best_k


def test_global_offset_respects_band():
    v = np.ones((10, 10))
    v[np.arange(5), np.arange(5, 10)] = -100.0  # k = 5, outside radius 2
    assert abs(global_offset(cm(v, 2.0))) <= 2


def test_offset_warp():
    w = offset_warp(2, 5, 0.04, 0.04, 5)
    np.testing.assert_allclose(w.source_times, [0, 0, 0, 0.04, 0.08])


def test_path_to_warp_examples():
    diag = AlignmentPath(np.array([[k, k] for k in range(5)]), 0.0)
    np.testing.assert_allclose(path_to_warp(diag, 0.04, 0.04).source_times, 0.04 * np.arange(5))
    p = AlignmentPath(np.array([[0, 0], [1, 0], [2, 0], [3, 1]]), 0.0)
    w = path_to_warp(p, 0.04, 0.04)
    assert w.source_times[0] == pytest.approx(0.04)
    assert w.source_times[1] == pytest.approx(0.12)


@st.composite
def monotone_paths(draw):
    n, m = draw(st.integers(1, 15)), draw(st.integers(1, 15))
    i = j = 0
    pairs = [(0, 0)]
    while (i, j) != (n - 1, m - 1):
        options = [(di, dj) for di, dj in ((1, 1), (0, 1), (1, 0)) if i + di < n and j + dj < m]
        di, dj = draw(st.sampled_from(options))
        i, j = i + di, j + dj
        pairs.append((i, j))
    return np.array(pairs)


@settings(max_examples=100, deadline=None)
@given(monotone_paths())
def test_path_to_warp_is_monotone(pairs):
    w = path_to_warp(AlignmentPath(pairs, 0.0), 0.01, 0.04)
    assert w.is_monotone()
    assert len(w) == pairs[-1, 1] + 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(1, 7), st.booleans(), st.integers(0, 2**31))
def test_dijkstra_matches_oracle_property(n, m, bias, seed):
    c = cm(np.random.default_rng(seed).normal(size=(n, m)))
    d = dijkstra_align(c, bias)
    assert d.total_cost == brute_force_align(c, bias).total_cost == relaxation_cost(c.values, bias)


def test_warp_json_and_identity():
    w = WarpFunction.identity(4, 0.04)
    np.testing.assert_allclose(w.source_times, [0, 0.04, 0.08, 0.12])
    back = WarpFunction.from_json(w.to_json())
    assert back.source_times.tolist() == w.source_times.tolist() and back.ref_step == 0.04
    assert set(json.loads(w.to_json())) == {"ref_step", "source_times"}


def test_warp_rejects_bad_input():
    with pytest.raises(ValueError):
        WarpFunction(np.array([]), 0.04)
    with pytest.raises(ValueError):
        WarpFunction(np.array([0.0, np.nan]), 0.04)
    with pytest.raises(ValueError):
        WarpFunction(np.array([0.0]), 0.0)
