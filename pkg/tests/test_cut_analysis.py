import numpy as np
import pytest

from cpphase.cut_analysis import (block_crossing_check, block_decomposition,
                                  block_statistics, edges_above,
                                  edges_above_profile, find_cut_points,
                                  find_kl_cut_points)
from cpphase.errors import (DecompositionUnavailableError, DomainError,
                            InsufficientDataError, MarginError)
from cpphase.graph_core import WindowedGraph, path_graph
from cpphase.graph_models import GilbertSpec, LrpSpec, gilbert_generate, lrp_generate


def periodic3_graph(lo=0, hi=32):
    """Path plus edges {3k, 3k+2}: cut points exactly at multiples of 3."""
    edges = list(map(tuple, path_graph(lo, hi).edges))
    for b in range(lo, hi - 1, 3):
        edges.append((b, b + 2))
    return WindowedGraph(lo, hi, edges, augmented=True)


def test_edges_above_path():
    g = path_graph(-20, 20)
    for z in (-10, 0, 7):
        assert edges_above(g, z) == 1


def test_edges_above_extra_edge():
    edges = list(map(tuple, path_graph(-20, 20).edges)) + [(-3, 4)]
    g = WindowedGraph(-20, 20, edges, augmented=True)
    assert edges_above(g, 0) == 2
    assert edges_above(g, 5) == 1


def test_edges_above_margin_enforced():
    g = path_graph(0, 99)
    with pytest.raises(MarginError):
        edges_above(g, 3)  # margin is 10
    assert edges_above(g, 3, enforce_margin=False) == 1
    with pytest.raises(DomainError):
        edges_above(g, 0, enforce_margin=False)


def test_profile_equals_direct_scan(lrp25_window):
    g = lrp25_window.induced_subgraph((-800, 800))
    zs, counts = edges_above_profile(g)
    direct = np.array([edges_above(g, int(z)) for z in zs])
    assert np.array_equal(direct, counts)


def test_find_cut_points_path():
    g = path_graph(0, 40)
    cuts = find_cut_points(g, 1)
    zs, _ = edges_above_profile(g)
    assert np.array_equal(cuts, zs)  # every interior vertex


def test_find_cut_points_blocked_by_long_edge():
    edges = list(map(tuple, path_graph(-30, 30).edges)) + [(-10, 10)]
    g = WindowedGraph(-30, 30, edges, augmented=True)
    cuts = set(find_cut_points(g, 1).tolist())
    for z in range(-9, 11):
        assert z not in cuts
    assert -15 in cuts and 15 in cuts


def test_kl_cut_points_path():
    g = path_graph(0, 40)
    zs, _ = edges_above_profile(g)
    assert np.array_equal(find_kl_cut_points(g, 1, 2), zs)


def test_kl_cut_points_length_rule():
    edges = list(map(tuple, path_graph(-20, 20).edges)) + [(0, 5)]
    g = WindowedGraph(-20, 20, edges, augmented=True)
    assert 3 not in find_kl_cut_points(g, 2, 4)   # crossing edge length 5 > 3
    assert 3 in find_kl_cut_points(g, 2, 6)


def test_kl_cut_points_gilbert_unit_radius():
    # radii 1 on the unit lattice: e(z) = 3 everywhere (link + two distance-2
    # pairs), all crossing lengths <= 2, so every interior vertex is a
    # (4,3)-cut; exhaustively checked against the direct scan
    g = gilbert_generate(GilbertSpec(points="unit", radius=("const", 1.0)),
                         (0, 60), seed=0)
    zs, counts = edges_above_profile(g)
    assert np.all(counts == 3)
    assert np.array_equal(find_kl_cut_points(g, 4, 3), zs)
    # with the exact-count variant nothing qualifies (e(z) = 3 != 4)
    assert len(find_kl_cut_points(g, 4, 3, exact=True)) == 0
    assert np.array_equal(find_kl_cut_points(g, 3, 3, exact=True), zs)


def test_block_decomposition_path_singletons():
    g = path_graph(0, 60)
    d = block_decomposition(g, 1)
    assert np.all(d.block_lengths() == 1)
    assert np.all(d.block_edge_counts == 0)


def test_block_decomposition_periodic():
    g = periodic3_graph()
    d = block_decomposition(g, 1)
    assert np.array_equal(d.cut_points, np.arange(3, 28, 3))
    assert np.all(d.block_lengths() == 3)
    assert np.all(d.block_edge_counts == 3)  # two path edges + one chord


def test_block_decomposition_needs_two_cuts():
    edges = list(map(tuple, path_graph(0, 30).edges)) + [(1, 29)]
    g = WindowedGraph(0, 30, edges, augmented=True)
    with pytest.raises(DecompositionUnavailableError):
        block_decomposition(g, 1)


def test_block_of_and_anchor(lrp25_window):
    d = block_decomposition(lrp25_window, 1)
    assert d.cut_points[d.anchor_index] >= 0
    k = d.n_blocks // 2
    start, end = d.blocks[k]
    assert d.block_of(start) == k and d.block_of(end) == k


def test_thinned_decomposition_crossing_property(lrp25_window):
    for K, L in ((1, 4), (2, 6), (3, 8)):
        d = block_decomposition(lrp25_window, K, L)
        max_cross, adjacent = block_crossing_check(d, lrp25_window)
        assert max_cross <= K
        assert adjacent


def test_block_statistics_periodic_exact():
    g = periodic3_graph(0, 32)  # margin 3 -> interior [3, 29], cuts 3..27
    d = block_decomposition(g, 1)
    st = block_statistics(d, g, min_blocks=5, origin_range=(3, 26), seed=0)
    assert st.p_hat == pytest.approx(1.0 / 3.0)
    assert st.mean_block == pytest.approx(3.0)
    assert st.kac_residual_mean == pytest.approx(0.0, abs=1e-12)
    # tau uniform on {0, 1, 2} -> E tau = 1 and (1 + 2)/ (1/3) = 9 exactly
    assert st.tau_hat == pytest.approx(1.0)
    assert st.mean_block_sq == pytest.approx(9.0)
    assert st.kac_residual_sq == pytest.approx(0.0, abs=1e-12)


def test_block_statistics_requires_blocks():
    g = periodic3_graph(0, 32)
    d = block_decomposition(g, 1)
    with pytest.raises(InsufficientDataError):
        block_statistics(d, g, min_blocks=30)


def test_block_statistics_lrp_kac_band():
    g = lrp_generate(LrpSpec(delta=2.5), (-50_000, 50_000), seed=11)
    d = block_decomposition(g, 1)
    st = block_statistics(d, g, seed=2)
    assert abs(st.mean_block - 1.0 / st.p_hat) < 0.05
    assert st.kac_consistent_mean
    assert st.edge_bound_ok
    assert st.mean_block_edges <= st.edge_density_bound


def test_kac_residual_shrinks_with_window():
    # deterministic regression over pinned seeds: quadrupling the window
    # halves (or better) the first-moment residual on average
    def mean_residual(half_width, seeds):
        vals = []
        for s in seeds:
            g = lrp_generate(LrpSpec(delta=2.5), (-half_width, half_width), seed=s)
            d = block_decomposition(g, 1)
            st = block_statistics(d, g, n_boot=10, seed=0)
            vals.append(abs(st.mean_block - 1.0 / st.p_hat))
        return float(np.mean(vals))

    seeds = range(20, 28)
    small = mean_residual(4000, seeds)
    large = mean_residual(16000, seeds)
    assert large <= small / 2.0


def test_max_crossing_length_reported(lrp25_window):
    d = block_decomposition(lrp25_window, 1)
    lengths = lrp25_window.edges[:, 1] - lrp25_window.edges[:, 0]
    assert d.max_crossing_length <= int(lengths.max())
    assert d.max_crossing_length >= 1
