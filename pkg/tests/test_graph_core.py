import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpphase.errors import DomainError, MarginError, SpecError
from cpphase.graph_core import (WindowedGraph, graph_from_text, graph_to_text,
                                path_graph, read_edge_file, star_window_graph,
                                write_edge_file)


def test_degree_augmented_path():
    g = path_graph(-5, 5)
    assert g.degree(0) == 2
    assert g.degree(-5) == 1  # boundary vertex


def test_degree_star_centre():
    edges = [(0, v) for v in (-3, -2, -1, 1, 2, 3)]
    g = WindowedGraph(-3, 3, edges)
    assert g.degree(0) == 6
    assert g.degree(2) == 1


def test_degree_matches_bruteforce_scan(lrp25_window):
    g = lrp25_window
    rng = np.random.default_rng(0)
    for v in rng.integers(g.lo, g.hi + 1, size=25):
        brute = int(np.sum((g.edges[:, 0] == v) | (g.edges[:, 1] == v)))
        assert g.degree(v) == brute


def test_degree_outside_window():
    g = path_graph(0, 5)
    with pytest.raises(DomainError):
        g.degree(6)


def test_edge_density_path():
    g = path_graph(0, 999)
    s = g.edge_density()
    assert s.edge_count == 999
    assert s.delta_hat == pytest.approx(2.0 * 999 / 1000)


def test_edge_density_lrp_delta2():
    # oracle: 2 * sum_{k<=K} k^-2 plus integral tail bound in [1/(K+1), 1/K]
    from cpphase.graph_models import LrpSpec, lrp_generate
    K = 10**6
    partial = np.sum(np.arange(1, K + 1, dtype=float) ** -2.0)
    oracle = 2.0 * (partial + 1.0 / K)  # zeta(2) tail ~ 1/K
    assert oracle == pytest.approx(2.0 * np.pi**2 / 6.0, rel=1e-5)
    g = lrp_generate(LrpSpec(delta=2.0), (-50_000, 50_000), seed=5)
    assert g.edge_density().delta_hat == pytest.approx(oracle, rel=0.02)


def test_edge_density_empty():
    g = WindowedGraph(0, 9)
    assert g.edge_density().delta_hat == 0.0


def test_induced_subgraph_examples(lrp25_window):
    g = path_graph(0, 5)
    full = g.induced_subgraph((0, 5))
    assert np.array_equal(full.edges, g.edges)
    sub = g.induced_subgraph((0, 2))
    assert sub.edge_count == 2
    single = lrp25_window.induced_subgraph((7, 7))
    assert single.edge_count == 0
    with pytest.raises(DomainError):
        lrp25_window.induced_subgraph((0, lrp25_window.hi + 1))


@st.composite
def small_graphs(draw):
    lo = draw(st.integers(-8, 0))
    hi = draw(st.integers(1, 9))
    n = hi - lo + 1
    pairs = st.tuples(st.integers(lo, hi), st.integers(lo, hi))
    edges = [e for e in draw(st.lists(pairs, max_size=25)) if e[0] != e[1]]
    return WindowedGraph(lo, hi, edges)


@given(small_graphs())
@settings(max_examples=60, deadline=None)
def test_degree_symmetry(g):
    assert int(g.degrees().sum()) == 2 * g.edge_count


@given(small_graphs(), st.data())
@settings(max_examples=60, deadline=None)
def test_induced_idempotent_and_intersection(g, data):
    a = data.draw(st.integers(g.lo, g.hi))
    b = data.draw(st.integers(a, g.hi))
    c = data.draw(st.integers(g.lo, b))
    d = data.draw(st.integers(max(c, a), b))
    sub = g.induced_subgraph((a, b))
    again = sub.induced_subgraph((a, b))
    assert np.array_equal(sub.edges, again.edges)
    # restriction of a restriction equals restriction to the intersection
    one = sub.induced_subgraph((d, b)) if d >= a else None
    two = g.induced_subgraph((d, b)) if d >= a else None
    if one is not None:
        assert np.array_equal(one.edges, two.edges)


def test_density_decomposes_over_interval_union(lrp25_window):
    g = lrp25_window
    mid = (g.lo + g.hi) // 2
    left = g.induced_subgraph((g.lo, mid))
    right = g.induced_subgraph((mid + 1, g.hi))
    cross = int(np.sum((g.edges[:, 0] <= mid) & (g.edges[:, 1] > mid)))
    assert left.edge_count + right.edge_count + cross == g.edge_count


def test_adjacency_consistency(lrp25_window):
    assert lrp25_window.adjacency_consistent()


def test_augmented_invariant_enforced():
    with pytest.raises(SpecError):
        WindowedGraph(0, 3, [(0, 1)], augmented=True)


def test_positions_strictly_increasing_required():
    with pytest.raises(SpecError):
        WindowedGraph(0, 2, positions=[0.0, 0.0, 1.0])


def test_edge_file_round_trip(tmp_path, lrp25_window):
    g = lrp25_window.induced_subgraph((-50, 50))
    p = tmp_path / "g.edges"
    write_edge_file(g, p)
    back = read_edge_file(p)
    assert back.lo == g.lo and back.hi == g.hi
    assert back.augmented == g.augmented
    assert np.array_equal(back.edges, g.edges)


def test_edge_file_reals_17_digits(tmp_path):
    rng = np.random.default_rng(3)
    pos = np.cumsum(rng.exponential(1.0, 20))
    marks = rng.random(20)
    g = WindowedGraph(0, 19, [(0, 5), (3, 9)], positions=pos, marks=marks)
    back = graph_from_text(graph_to_text(g))
    assert np.array_equal(back.positions, g.positions)  # bit-exact round trip
    assert np.array_equal(back.marks, g.marks)


def test_star_window_graph():
    g = star_window_graph(4)
    assert g.degree(0) == 4
    assert all(g.degree(v) == 1 for v in range(1, 5))
