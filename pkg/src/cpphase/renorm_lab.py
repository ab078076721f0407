"""Box-scale diagnostics for the lattice Boolean model (d >= 2).

When the degree power law is heavy enough (gamma > 1/d), every large box
contains a vertex whose box-restricted degree exceeds ``L**(gamma - eps)``
(a "good" box hosting a long-surviving star), and the number of reseeding
attempts between neighbouring stars beats the cost of the connecting path:
the expression ``c4 * L**(gamma-eps) - 2**(1+1/d) * log((1+lam)/lam) * L**(1/d)``
tends to infinity.  The lab measures these two computable ingredients (the
good-box field and the path exponent) and the end-to-end signature: how the
extinction time of the contact process grows with the box side on either
side of gamma = 1/d.  The oriented-percolation coupling itself is a proof
device with existential constants and is not replicated; its parameters are
housed in :class:`RenormConfig` for documentation only.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from . import stats as _stats
from ._kernels import FATE_EXTINCT, cp_run
from .errors import DomainError, SpecError
from .graph_core import LatticeGraph
from .graph_models import BooleanLatticeSpec, boolean_lattice_generate

__all__ = [
    "RenormConfig", "GoodBoxField", "PathExponent", "BoxSurvivalRow",
    "good_box_field", "infection_path_exponent", "box_survival_experiment",
]


@dataclass(frozen=True)
class RenormConfig:
    """Parameters of the box renormalisation.

    ``p`` and ``q`` (oriented-percolation site/edge densities) and
    ``eps1 > eps2`` (star-occupation fractions) appear only inside the
    block-coupling argument; they are recorded, not tuned, and drive no
    computation here.
    """

    gamma: float
    eps: float
    L: int
    lam: float
    d: int = 2
    c4: float = 1.0
    p: float | None = None
    q: float | None = None
    eps1: float | None = None
    eps2: float | None = None

    def __post_init__(self):
        if self.d < 2:
            raise SpecError("renormalisation runs in dimension d >= 2")
        if not 0.0 < self.gamma < 1.0:
            raise SpecError("gamma must lie in (0, 1)")
        if self.eps <= 0:
            raise SpecError("eps must be positive")
        side = round(self.L ** (1.0 / self.d))
        if side ** self.d != self.L:
            raise SpecError("box volume L must be a d-th power of an integer")
        if self.c4 <= 0:
            raise SpecError("c4 must be positive")


@dataclass
class GoodBoxField:
    """Per-box maxima of the box-restricted degree and the good/bad field."""

    grid_shape: tuple
    side: int
    volume: int
    threshold: float
    max_degrees: np.ndarray
    good: np.ndarray
    fraction: float
    ci: tuple

    @property
    def n_boxes(self) -> int:
        return int(self.good.size)


def good_box_field(graph: LatticeGraph, L: int, gamma: float, eps: float,
                   level: float = 0.99) -> GoodBoxField:
    """Partition the sampled region into boxes of volume L and flag each box
    good when some site's degree *restricted to the box* reaches
    ``L**(gamma - eps)``.

    Restricted degrees depend only on the marks inside the box, so the
    verdicts are independent across boxes by construction.
    """
    d = graph.d
    side = round(L ** (1.0 / d))
    if side ** d != L:
        raise SpecError("box volume L must be a d-th power of an integer")
    if any(s % side for s in graph.shape):
        raise DomainError(f"region {graph.shape} is not divisible into boxes of side {side}")
    grid_shape = tuple(s // side for s in graph.shape)
    n_boxes = int(np.prod(grid_shape))
    if n_boxes < 1:
        raise DomainError("region smaller than one box")

    coords = graph.all_coords()
    box_coord = coords // side
    box_id = np.ravel_multi_index(box_coord.T, grid_shape)
    restricted = np.zeros(graph.n_sites, dtype=np.int64)
    e = graph.edges
    if len(e):
        same = box_id[e[:, 0]] == box_id[e[:, 1]]
        np.add.at(restricted, e[same, 0], 1)
        np.add.at(restricted, e[same, 1], 1)
    max_deg = np.zeros(n_boxes, dtype=np.int64)
    np.maximum.at(max_deg, box_id, restricted)
    threshold = L ** (gamma - eps)
    good = max_deg >= threshold
    frac = float(good.mean())
    ci = _stats.wilson_interval(int(good.sum()), n_boxes, level)
    return GoodBoxField(grid_shape=grid_shape, side=side, volume=L,
                        threshold=threshold, max_degrees=max_deg, good=good,
                        fraction=frac, ci=ci)


@dataclass(frozen=True)
class PathExponent:
    value: float
    positive: bool
    minimal_L: int | None      # smallest d-th-power volume with positive value
    exponent_gap: float        # gamma - eps - 1/d; growth requires > 0


def infection_path_exponent(L: int, d: int, gamma: float, eps: float,
                            lam: float, c4: float = 1.0,
                            search_cap: float = 1e12) -> PathExponent:
    """Evaluate ``c4*L**(gamma-eps) - 2**(1+1/d) * log((1+lam)/lam) * L**(1/d)``.

    The first term counts reseeding attempts from a good box's star, the
    second the log-cost of pushing the infection along a nearest-neighbour
    path to the adjacent box; a positive value means attempts win.
    """
    if lam <= 0:
        raise DomainError("lam must be positive")
    gap = gamma - eps - 1.0 / d
    if gap <= 0:
        warnings.warn("eps >= gamma - 1/d: the expression is eventually negative "
                      "and no positivity threshold exists", stacklevel=2)

    def value_at(vol: float) -> float:
        return c4 * vol ** (gamma - eps) - 2.0 ** (1.0 + 1.0 / d) \
            * math.log((1.0 + lam) / lam) * vol ** (1.0 / d)

    val = value_at(float(L))
    minimal = None
    if gap > 0:
        s = 2
        while s ** d <= search_cap:
            if value_at(float(s ** d)) > 0:
                minimal = s ** d
                break
            s += 1
    return PathExponent(value=val, positive=val > 0, minimal_L=minimal,
                        exponent_gap=gap)


@dataclass(frozen=True)
class BoxSurvivalRow:
    side: int
    gamma: float
    lam: float
    replicas: int
    quantile: float
    value: float
    ci: tuple
    n_censored: int
    is_lower_bound: bool


def box_survival_experiment(gamma: float, box_sides, lam: float, replicas: int,
                            seed, d: int = 2, init_fraction: float = 0.2,
                            event_budget: int = 20_000_000,
                            horizon: float = 1e7, quantile: float = 0.5,
                            level: float = 0.99) -> list:
    """Extinction-time quantiles of the contact process on fresh Boolean boxes,
    started from a fully infected central sub-box of side ``side*init_fraction``.

    Budget- or horizon-censored replicas enter at their censoring time and
    flag the row's quantile as a lower bound.
    """
    spec = BooleanLatticeSpec(d=d, gamma=gamma)
    rows = []
    for side in box_sides:
        side = int(side)
        times = np.empty(replicas)
        censored = 0
        core = max(1, int(side * init_fraction))
        lo_c = (side - core) // 2
        kseeds = _rng.substream_seeds(seed, f"renorm.cp.{side}", replicas)
        for i in range(replicas):
            gseed = int(_rng.seed_sequence(seed, f"renorm.graph.{side}", i)
                        .generate_state(1, np.uint64)[0])
            graph = boolean_lattice_generate(spec, (side,) * d, gseed)
            coords = graph.all_coords()
            inside = np.all((coords >= lo_c) & (coords < lo_c + core), axis=1)
            init = np.nonzero(inside)[0].astype(np.int64)
            indptr, indices = graph.csr()
            perm = np.zeros(graph.n_sites, dtype=np.bool_)
            fate, t_end, _ev, _c, _rs, _rm, _ni = cp_run(
                indptr, indices, float(lam), float(horizon), init, perm,
                np.int64(-1), np.int64(graph.n_sites),
                np.empty(0, dtype=np.float64), np.int64(event_budget), kseeds[i])
            times[i] = t_end
            if fate != FATE_EXTINCT:
                censored += 1
        est, lo, hi = _stats.quantile_ci(times, quantile, level)
        rows.append(BoxSurvivalRow(side=side, gamma=gamma, lam=lam,
                                   replicas=replicas, quantile=quantile,
                                   value=est, ci=(lo, hi), n_censored=censored,
                                   is_lower_bound=censored > 0))
    return rows
