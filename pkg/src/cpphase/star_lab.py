"""Persistence experiments on star graphs.

A star with k leaves sustains the infection for a long time once a decent
share of its leaves is infected; the threshold share is
``K = ceil(k * lam / (1 + 2*lam))``.  The lab estimates

* the probability that, starting from K infected leaves (root infected or
  not), the infected count never drops below ``eps1 * K`` up to a horizon,
* the same starting from the root only, with the infimum taken over
  ``[k**(2/3), horizon]``, and
* extinction-time quantiles as a function of k.

The existential constants attached to these bounds are never estimated as
ground truth; the lab reports empirical rates and leaves calibration to the
user.  Simulation uses the aggregated (root state, infected-leaf count)
representation -- O(1) state, exact rates, validated against the vertex-level
engine for small k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from . import stats as _stats
from ._kernels import star_run
from .errors import BudgetExceededError, DomainError, SpecError
from .graph_core import star_window_graph

__all__ = [
    "StarExperimentConfig", "PersistenceEstimate", "ScalingRow",
    "star_threshold", "star_persist_from_K", "star_persist_from_root",
    "star_survival_time_scaling", "first_infection_race",
]


def star_threshold(k: int, lam: float) -> int:
    """ceil(k * lam / (1 + 2*lam)), guarded against float round-off."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if lam <= 0:
        raise DomainError("lam must be positive")
    x = k * lam / (1.0 + 2.0 * lam)
    c = math.ceil(x - 1e-12)
    return max(1, int(c))


@dataclass(frozen=True)
class StarExperimentConfig:
    """Inputs for one persistence estimate.

    ``c1, c2, c3`` are user-supplied calibration constants (the theory only
    asserts their existence); when ``horizon`` is None it defaults to
    ``min(exp(c2 * k), budget-implied cap)`` with explicit censoring.
    """

    k: int
    lam: float
    initial: str = "K_leaves_plus_root"
    eps1: float = 0.1
    horizon: float | None = 100.0
    replicas: int = 1000
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    event_budget: int = 50_000_000

    def __post_init__(self):
        if self.k < 1:
            raise SpecError("k must be >= 1")
        if not 0.0 < self.eps1 < 1.0:
            raise SpecError("eps1 must lie in (0, 1)")
        if self.initial not in ("K_leaves_plus_root", "root_only"):
            raise SpecError(f"unknown initial condition {self.initial!r}")
        if self.horizon is not None and self.horizon <= 0:
            raise SpecError("horizon must be positive")

    def resolved_horizon(self) -> float:
        if self.horizon is not None:
            return float(self.horizon)
        if self.c2 is None:
            raise SpecError("horizon=None needs the growth constant c2")
        cap = self.event_budget / ((self.k + 1.0) * (1.0 + self.lam))
        return min(math.exp(self.c2 * self.k), cap)


@dataclass(frozen=True)
class PersistenceEstimate:
    probability: float
    ci: tuple
    successes: int
    replicas: int
    threshold: int
    window: tuple
    n_budget_censored: int
    config: StarExperimentConfig


def _check_budget(config: StarExperimentConfig, horizon: float):
    # crude per-replica expectation: total rate is at most (k+1)(1+lam)
    expected = horizon * (config.k + 1) * (1.0 + config.lam)
    if expected > config.event_budget:
        raise BudgetExceededError(
            f"expected ~{expected:.3g} events/replica exceeds the budget "
            f"{config.event_budget}; raise event_budget to at least "
            f"{int(expected * 1.2)} or shorten the horizon",
            required=int(expected * 1.2))


def _persist(config: StarExperimentConfig, seed, root0: bool, leaves0: int,
             t_lo: float, level: float) -> PersistenceEstimate:
    horizon = config.resolved_horizon()
    _check_budget(config, horizon)
    K = star_threshold(config.k, config.lam)
    threshold = max(1, math.ceil(config.eps1 * K - 1e-12))
    seeds = _rng.substream_seeds(seed, "star", config.replicas)
    succ = 0
    censored = 0
    for i in range(config.replicas):
        mn, _ext, budget_hit, _ev = star_run(
            np.int64(config.k), float(config.lam), root0, np.int64(leaves0),
            float(t_lo), float(horizon), np.int64(threshold), True,
            np.int64(config.event_budget), seeds[i])
        if budget_hit:
            censored += 1  # min so far was above threshold when the budget hit
        if mn >= threshold and not budget_hit:
            succ += 1
    return PersistenceEstimate(
        probability=succ / config.replicas,
        ci=_stats.wilson_interval(succ, config.replicas, level),
        successes=succ, replicas=config.replicas, threshold=threshold,
        window=(t_lo, horizon), n_budget_censored=censored, config=config)


def star_persist_from_K(config: StarExperimentConfig, seed,
                        level: float = 0.99) -> PersistenceEstimate:
    """P(infected count stays >= eps1*K on [0, T]) from K infected leaves.

    ``initial='K_leaves_plus_root'`` also infects the root;
    ``initial='root_only'`` here means the root-susceptible variant (the
    persistence bound survives an initially healthy centre)."""
    K = star_threshold(config.k, config.lam)
    root0 = config.initial == "K_leaves_plus_root"
    return _persist(config, seed, root0, min(K, config.k), 0.0, level)


def star_persist_from_root(config: StarExperimentConfig, seed,
                           level: float = 0.99) -> PersistenceEstimate:
    """P(infected count stays >= eps1*K on [k^(2/3), T]) from the root alone."""
    if config.initial != "root_only":
        raise SpecError("from-root estimates need initial='root_only'")
    t_lo = config.k ** (2.0 / 3.0)
    horizon = config.resolved_horizon()
    if t_lo >= horizon:
        raise DomainError(f"observation window empty: k^(2/3)={t_lo:.3g} >= T={horizon:.3g}")
    return _persist(config, seed, True, 0, t_lo, level)


@dataclass(frozen=True)
class ScalingRow:
    k: int
    quantile: float
    value: float
    ci: tuple
    n_censored: int
    is_lower_bound: bool


def star_survival_time_scaling(k_grid, lam: float, quantile: float, replicas: int,
                               seed, event_budget: int = 20_000_000,
                               horizon: float = 1e8, level: float = 0.99):
    """Extinction-time quantiles from the K-infected start, per k.

    Returns ``(rows, fit)`` where ``fit`` carries the slope of log(time)
    against k and against log(k), each with a CI.  Budget-censored replicas
    enter the quantile at their censoring time and flag the row as a lower
    bound.
    """
    ks = [int(k) for k in k_grid]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("k grid must be strictly increasing")
    rows = []
    for j, k in enumerate(ks):
        K = star_threshold(k, lam)
        seeds = _rng.substream_seeds(seed, f"star.scaling.{j}", replicas)
        times = np.empty(replicas)
        censored = 0
        for i in range(replicas):
            _mn, ext, budget_hit, _ev = star_run(
                np.int64(k), float(lam), True, np.int64(min(K, k)), 0.0,
                float(horizon), np.int64(-1), False,
                np.int64(event_budget), seeds[i])
            if ext >= 0.0 and not budget_hit:
                times[i] = ext
            else:
                times[i] = horizon if not budget_hit else np.nan
                censored += 1
        times = np.where(np.isnan(times), np.nanmax(times), times)
        est, lo, hi = _stats.quantile_ci(times, quantile, level)
        rows.append(ScalingRow(k=k, quantile=quantile, value=est, ci=(lo, hi),
                               n_censored=censored,
                               is_lower_bound=censored > 0))
    xs = np.array([r.k for r in rows], dtype=float)
    y = np.log(np.maximum([r.value for r in rows], 1e-12))
    slope_k, _, ci_k = _stats.fit_line(xs, y, level)
    slope_logk, _, ci_logk = _stats.fit_line(np.log(xs), y, level)
    fit = {"slope_vs_k": slope_k, "slope_vs_k_ci": ci_k,
           "slope_vs_log_k": slope_logk, "slope_vs_log_k_ci": ci_logk}
    return rows, fit


def first_infection_race(k: int, lam: float, initial_leaves: int, replicas: int,
                         seed, horizon: float = 60.0):
    """Leaf recoveries before the root's first infection, via the
    vertex-level graphical engine (event log).

    With the root susceptible and only leaves infected, every event is a race
    between one leaf recovery (total rate n) and the root's infection (rate
    lam * n), so each step infects the root first with probability
    lam / (1 + lam) regardless of n.  Returns
    ``(recoveries_before_root, root_infected_flags)`` arrays.
    """
    from .graphical import MarkStreams, graphical_run
    if not 1 <= initial_leaves <= k:
        raise DomainError("initial_leaves must lie in [1, k]")
    g = star_window_graph(k)
    recov = np.empty(replicas, dtype=np.int64)
    hit = np.zeros(replicas, dtype=bool)
    init = tuple(range(1, initial_leaves + 1))
    for r in range(replicas):
        streams = MarkStreams(seed, lam_max=lam, replica=r)
        out = graphical_run(g, lam, streams, init=init, horizon=horizon,
                            record_events=True)
        nrec = 0
        for t, kind, v in out.event_log:
            if kind == "infect" and v == 0:
                hit[r] = True
                break
            if kind == "recover":
                nrec += 1
        recov[r] = nrec
    return recov, hit
