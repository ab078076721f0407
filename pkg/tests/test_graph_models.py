import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from cpphase.errors import DomainError, GenerationError, SpecError
from cpphase.graph_core import path_graph
from cpphase.graph_models import (BooleanLatticeSpec, CliqueChainSpec,
                                  GilbertSpec, LrpSpec, ProductKernel,
                                  WdrcmSpec, boolean_lattice_generate,
                                  clique_chain_generate, gilbert_generate,
                                  interval_overlap_edges, lrp_condition_check,
                                  lrp_crossing_samples, lrp_cut_probability,
                                  lrp_generate, lrp_windowed_link_probability,
                                  spec_from_config, spec_to_config,
                                  wdrcm_cut_condition, wdrcm_generate,
                                  _product_band_area)

from conftest import three_se_band


# -- long-range percolation ---------------------------------------------------


def test_lrp_power_law_forces_links():
    g = lrp_generate(LrpSpec(delta=2.5), (0, 200), seed=1)
    assert g.augmented
    zs = np.arange(0, 200)
    assert all(g.has_edge(z, z + 1) for z in zs)


def test_lrp_table_path_graph():
    spec = LrpSpec(table={1: 1.0, 2: 0.0}, table_tail_zero=True)
    g = lrp_generate(spec, (-20, 20), seed=9)
    assert np.array_equal(g.edges, path_graph(-20, 20).edges)


def test_lrp_delta2_mean_degree():
    # oracle: partial sums of 2 sum k^-2 with integral tail bound
    K = 10**6
    oracle = 2.0 * (np.sum(np.arange(1, K + 1, dtype=float) ** -2.0) + 1.0 / K)
    g = lrp_generate(LrpSpec(delta=2.0), (-50_000, 50_000), seed=2)
    assert g.edge_density().delta_hat == pytest.approx(oracle, rel=0.02)


def test_lrp_determinism():
    a = lrp_generate(LrpSpec(delta=2.2), (-2000, 2000), seed=7)
    b = lrp_generate(LrpSpec(delta=2.2), (-2000, 2000), seed=7)
    assert np.array_equal(a.edges, b.edges)
    c = lrp_generate(LrpSpec(delta=2.2), (-2000, 2000), seed=8)
    assert not np.array_equal(a.edges, c.edges)


def test_lrp_edge_frequency_within_3se():
    spec = LrpSpec(delta=2.5)
    g = lrp_generate(spec, (0, 20_000), seed=3)
    lengths = g.edges[:, 1] - g.edges[:, 0]
    n = g.n
    for k in range(2, 11):
        pairs = n - k
        freq = int(np.sum(lengths == k)) / pairs
        p = float(k) ** -2.5
        assert abs(freq - p) <= three_se_band(p, pairs), f"distance {k}"


def test_lrp_invalid_phi():
    with pytest.raises(SpecError):
        LrpSpec(table={1: 1.5})
    with pytest.raises(SpecError):
        LrpSpec(delta=1.0)


# -- Gilbert ------------------------------------------------------------------


def test_gilbert_small_radii_is_path():
    spec = GilbertSpec(points="unit", radius=("const", 0.3))
    g = gilbert_generate(spec, (0, 50), seed=4)
    assert np.array_equal(g.edges, path_graph(0, 50).edges)


def test_gilbert_radius_one_degree_four():
    spec = GilbertSpec(points="unit", radius=("const", 1.0))
    g = gilbert_generate(spec, (0, 50), seed=4)
    assert g.degree(25) == 4
    assert sorted(g.neighbors(25).tolist()) == [23, 24, 26, 27]


def test_gilbert_positive_cut_density_poisson_pareto():
    # finite-mean radii: some finite K has positive 2K-cut density, measured
    # over many windows and cross-checked through the cut scanner
    from cpphase.cut_analysis import find_cut_points
    spec = GilbertSpec(points="poisson", radius=("pareto", 1.5))
    found = 0
    total_interior = 0
    for s in range(100):
        g = gilbert_generate(spec, (0, 200), seed=1000 + s)
        cuts = find_cut_points(g, K=4)  # 2K with K=2 covered radii
        found += len(cuts)
        total_interior += g.n - 2 * g.margin
    assert found > 0
    assert found / total_interior > 0.005


def test_gilbert_zero_spacing_rejected():
    spec = GilbertSpec(points="renewal", spacing=("const", 0.0))
    with pytest.raises(GenerationError):
        gilbert_generate(spec, (0, 10), seed=0)


def test_interval_overlap_monotone_in_radii():
    rng = np.random.default_rng(11)
    pos = np.cumsum(rng.exponential(1.0, 300))
    rad = rng.pareto(1.5, 300) + 0.1
    small = set(map(tuple, interval_overlap_edges(pos, rad).tolist()))
    large = set(map(tuple, interval_overlap_edges(pos, rad + 0.7).tolist()))
    assert small <= large


def test_interval_overlap_bruteforce():
    rng = np.random.default_rng(12)
    pos = np.sort(rng.uniform(0, 30, 60))
    rad = rng.uniform(0, 2, 60)
    got = set(map(tuple, interval_overlap_edges(pos, rad).tolist()))
    want = {(i, j) for i in range(60) for j in range(i + 1, 60)
            if abs(pos[i] - pos[j]) <= rad[i] + rad[j]}
    assert got == want


# -- WDRCM ---------------------------------------------------------------------


def test_wdrcm_gamma_zero_unit_points_is_path():
    spec = WdrcmSpec(gamma=0.0, points="unit")
    g = wdrcm_generate(spec, (0, 40), seed=5)
    assert np.array_equal(g.edges, path_graph(0, 40).edges)


def test_product_kernel_arithmetic():
    k = ProductKernel(0.4)
    # (0.25)^-0.4 = 1.7411 < 2, so marks (0.5, 0.5) never reach distance 2
    assert k.reach(0.5, 0.5) == pytest.approx(0.25 ** -0.4)
    assert 0.25 ** -0.4 == pytest.approx(1.7411, abs=1e-4)
    assert float(k.prob(0.5, 0.5, 2.0)) == 0.0
    assert float(k.prob(0.5, 0.5, 1.7)) == 1.0


def test_product_kernel_mark_one_endpoint():
    k = ProductKernel(0.4)
    assert float(k.prob(1.0, 1.0, 1.0)) == 1.0
    assert float(k.prob(1.0, 1.0, 1.0001)) == 0.0


def test_wdrcm_monotone_in_gamma():
    # same seed -> same points, marks and pair uniforms; larger gamma only
    # increases the product kernel's reach
    a = wdrcm_generate(WdrcmSpec(gamma=0.2, points="unit"), (0, 500), seed=6)
    b = wdrcm_generate(WdrcmSpec(gamma=0.45, points="unit"), (0, 500), seed=6)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.marks, b.marks)
    ea = set(map(tuple, a.edges.tolist()))
    eb = set(map(tuple, b.edges.tolist()))
    assert ea <= eb and len(eb) > len(ea)


def test_wdrcm_kernel_validation_rejects_asymmetric():
    class Bad:
        name = "bad"
        def prob(self, u, v, r):
            return np.where(np.asarray(u) < np.asarray(v), 1.0, 0.0)
        def reach(self, u, v):
            return 2.0
    with pytest.raises(SpecError):
        wdrcm_generate(WdrcmSpec(gamma=0.3, kernel=Bad()), (0, 30), seed=0)


# -- Boolean lattice -----------------------------------------------------------


def test_boolean_marks_one_distance_two():
    spec = BooleanLatticeSpec(d=2, gamma=0.75)
    g = boolean_lattice_generate(spec, (11, 11), seed=0, marks=1.0)
    centre = g.site_index((5, 5))
    nbrs = {g.coords(v) for v in g.neighbors(centre)}
    want = {(5 + dx, 5 + dy) for dx in range(-2, 3) for dy in range(-2, 3)
            if 0 < dx * dx + dy * dy <= 4}
    assert nbrs == want  # all |z-v| <= 2, nothing at distance 3


def test_boolean_planted_heavy_mark_degree():
    # disc lattice-point count oracle: with every other radius forced to 1,
    # the planted site's degree is exactly #{sites within r+1} - 1
    spec = BooleanLatticeSpec(d=2, gamma=0.75)
    side = 75
    n = side * side
    marks = np.ones(n)
    centre = (side // 2) * side + side // 2
    u = 1e-4
    marks[centre] = u
    g = boolean_lattice_generate(spec, (side, side), seed=0, marks=marks)
    r = u ** (-0.75 / 2)
    assert r == pytest.approx(10 ** 1.5)
    cx, cy = side // 2, side // 2
    xs, ys = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    dist2 = (xs - cx) ** 2 + (ys - cy) ** 2
    oracle = int(np.sum(dist2 <= (r + 1.0) ** 2)) - 1
    assert g.degree(centre) == oracle
    # the planted radius is ~31.6, so pi*r^2 approximates the count loosely
    assert math.pi * r * r == pytest.approx(np.sum(dist2 <= r * r), rel=0.05)


def test_boolean_monotone_in_marks():
    spec = BooleanLatticeSpec(d=2, gamma=0.5)
    rng = np.random.default_rng(8)
    u = rng.random(20 * 20) * 0.9 + 0.05
    a = boolean_lattice_generate(spec, (20, 20), seed=0, marks=u)
    b = boolean_lattice_generate(spec, (20, 20), seed=0, marks=u ** 2)  # smaller marks
    ea = set(map(tuple, a.edges.tolist()))
    eb = set(map(tuple, b.edges.tolist()))
    assert ea <= eb


def test_boolean_bruteforce_small():
    spec = BooleanLatticeSpec(d=2, gamma=0.6)
    g = boolean_lattice_generate(spec, (9, 9), seed=3)
    radii = g.marks ** (-0.6 / 2)
    coords = g.all_coords()
    want = set()
    for i in range(g.n_sites):
        for j in range(i + 1, g.n_sites):
            d = np.sqrt(((coords[i] - coords[j]) ** 2).sum())
            if d <= radii[i] + radii[j]:
                want.add((i, j))
    assert set(map(tuple, g.edges.tolist())) == want


# -- clique chain ----------------------------------------------------------------


def test_clique_chain_const1_is_path():
    g, backbone = clique_chain_generate(CliqueChainSpec(k_law=("const", 1)), (0, 30), 1)
    assert np.array_equal(g.edges, path_graph(0, 30).edges)
    assert np.array_equal(backbone, np.arange(0, 31))


def test_clique_chain_const3_degrees():
    g, backbone = clique_chain_generate(CliqueChainSpec(k_law=("const", 3)), (0, 10), 1)
    for b in backbone[1:-1]:
        assert g.degree(b) == 4  # two backbone + two clique companions
    assert g.n == 33


# -- condition checkers ----------------------------------------------------------


def test_lrp_conditions_delta25():
    from scipy.special import zeta
    r = lrp_condition_check(LrpSpec(delta=2.5))
    assert r["expected_crossings"].verdict == "satisfied"
    # sum k * k^-2.5 = zeta(1.5) = 2.612..., inside [partial, partial + tail]
    z = float(zeta(1.5))
    assert z == pytest.approx(2.612, abs=5e-4)
    assert r["expected_crossings"].partial_value <= z <= r["expected_crossings"].total_bound
    assert r["overall"].verdict == "satisfied"


def test_lrp_conditions_delta2_violated():
    r = lrp_condition_check(LrpSpec(delta=2.0))
    assert r["expected_crossings"].verdict == "violated"
    assert "harmonic" in r["expected_crossings"].witness
    assert r["overall"].verdict == "violated"


def test_lrp_conditions_delta15_split():
    r = lrp_condition_check(LrpSpec(delta=1.5))
    assert r["mean_degree_sum"].verdict == "satisfied"      # sparse
    assert r["expected_crossings"].verdict == "violated"    # no cut density
    assert r["overall"].verdict == "violated"


def test_lrp_conditions_table_inconclusive():
    r = lrp_condition_check(LrpSpec(table={1: 1.0, 2: 0.5}))
    assert r["expected_crossings"].verdict == "inconclusive"
    r2 = lrp_condition_check(LrpSpec(table={1: 1.0, 2: 0.5}, table_tail_zero=True))
    assert r2["overall"].verdict == "satisfied"


def test_product_band_area_matches_quadrature():
    gamma = 0.4
    for n in (1, 2, 4, 6):
        a = 2.0 ** (-n * 1.2)
        c = 2.0 ** (-n / gamma)
        got = _product_band_area(a, c)
        want, err = dblquad(lambda v, u: 1.0 if u * v <= c else 0.0, a, 1.0, a, 1.0)
        assert got == pytest.approx(want, abs=5e-6 + 3 * err)


@pytest.mark.parametrize("gamma,verdict", [(0.4, "satisfied"), (0.49, "satisfied"),
                                           (0.5, "violated"), (0.6, "violated")])
def test_wdrcm_cut_condition_gamma(gamma, verdict):
    assert wdrcm_cut_condition(WdrcmSpec(gamma=gamma, mu=0.2)).verdict == verdict


def test_wdrcm_cut_condition_zero_kernel():
    class Zero:
        name = "zero"
        def prob(self, u, v, r):
            return np.zeros_like(np.asarray(u, dtype=float) * np.asarray(v, dtype=float)
                                 * np.asarray(r, dtype=float))
        def reach(self, u, v):
            return 0.0
    r = wdrcm_cut_condition(WdrcmSpec(gamma=0.3, kernel=Zero()), n_max=8)
    assert r.partial_value == 0.0
    assert r.verdict == "satisfied"


# -- cut probability ---------------------------------------------------------------


def test_cut_probability_trivial_cases():
    assert lrp_cut_probability(LrpSpec(table={1: 1.0}, table_tail_zero=True)) == (1.0, 1.0)
    assert lrp_cut_probability(LrpSpec(table={1: 1.0, 2: 1.0}, table_tail_zero=True)) == (0.0, 0.0)


def test_cut_probability_requires_sure_link():
    with pytest.raises(DomainError):
        lrp_cut_probability(LrpSpec(table={1: 0.9}))


def test_cut_probability_delta25_regression():
    # frozen from the truncated-product oracle (k_max = 1e4, integral tail);
    # cross-checked against crossing-count Monte Carlo in the acceptance suite
    p_lo, p_hi = lrp_cut_probability(LrpSpec(delta=2.5), k_max=10_000)
    assert p_lo == pytest.approx(0.190496149737748, abs=1e-12)
    assert p_hi == pytest.approx(0.19434442723277665, abs=1e-12)
    assert 0.0 < p_lo < p_hi < 1.0


def test_crossing_samples_match_windowed_product():
    # independent finite-window oracle: exact product over in-window pairs
    spec = LrpSpec(delta=2.5)
    W = 300
    exact = lrp_windowed_link_probability(spec, W)
    ks = np.arange(2, 2 * W + 1, dtype=np.int64)
    gen = np.random.default_rng(17)
    R = 4000
    tot = np.zeros(R, dtype=np.int64)
    for k in ks:
        cnt = min(int(k), 2 * W - int(k) + 1)
        tot += gen.binomial(cnt, float(k) ** -2.5, size=R)
    freq = float(np.mean(tot == 0))
    assert abs(freq - exact) <= three_se_band(exact, R)


# -- config round trip --------------------------------------------------------------


@pytest.mark.parametrize("spec", [
    LrpSpec(delta=2.5),
    LrpSpec(table={1: 1.0, 3: 0.25}, table_tail_zero=True),
    GilbertSpec(points="poisson", radius=("pareto", 1.5)),
    WdrcmSpec(gamma=0.4, mu=0.3, points="unit"),
    BooleanLatticeSpec(d=2, gamma=0.75),
    CliqueChainSpec(k_law=("const", 3)),
])
def test_spec_config_round_trip(spec):
    back = spec_from_config(spec_to_config(spec))
    assert type(back) is type(spec)
    if isinstance(spec, WdrcmSpec):
        assert (back.gamma, back.mu, back.points) == (spec.gamma, spec.mu, spec.points)
    else:
        assert back == spec
