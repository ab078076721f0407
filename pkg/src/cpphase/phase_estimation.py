"""Survival-probability curves, rate sweeps and bracketed critical-rate search.

The finite-volume survival proxy is "not extinct by the horizon on the
window", reported under two boundary conventions: replicas whose infection
touches the window margin count as survived (upper) or as extinct (lower).
The two bracket the infinite-volume quantity; no extrapolation to infinite
time or volume is claimed anywhere.

``estimate_lambda_c`` bisects the proxy between an extinction-indicated and
a survival-indicated rate.  "Survival-indicated" means the Wilson lower
confidence bound exceeds twice the pure-death analytic floor exp(-horizon),
which guards against false positives from the single-vertex death clock.
The returned bracket must be stable (overlapping) when window and horizon
are doubled, else it is widened and flagged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from . import stats as _stats
from .contact_process import SimParams, simulate_batch, resolve_threads
from ._kernels import FATE_ALIVE, FATE_CENSORED, FATE_EXTINCT
from .errors import BracketError, DomainError, SpecError
from .graph_core import WindowedGraph
from .graph_models import generate_graph, spec_to_dict

__all__ = [
    "SurvivalEstimate", "SweepResult", "LambdaCResult",
    "survival_probability", "lambda_sweep", "estimate_lambda_c",
    "analytic_survival_floor", "coupled_survival_indicators",
]


def analytic_survival_floor(horizon: float) -> float:
    """Survival probability of a single vertex with no infections: exp(-T)."""
    return math.exp(-horizon)


@dataclass(frozen=True)
class SurvivalEstimate:
    """Survival proxy under both boundary-censoring conventions."""

    lam: float
    window: int
    horizon: float
    replicas: int
    mode: str
    p_upper: float          # censored replicas count as survived
    ci_upper: tuple
    p_lower: float          # censored replicas count as extinct
    ci_lower: tuple
    tallies: dict
    seed: int

    def indicated(self, convention: str, level_floor: float) -> bool:
        ci = self.ci_upper if convention == "upper" else self.ci_lower
        return ci[0] > 2.0 * level_floor


def _window_interval(window: int):
    half = (int(window) - 1) // 2
    return -half, int(window) - 1 - half


def _resolve_graph(model, window, seed):
    if isinstance(model, WindowedGraph):
        return model
    return generate_graph(model, window=_window_interval(window), seed=seed)


def survival_probability(model, lam: float, window: int, horizon: float,
                         replicas: int, seed, mode: str = "annealed",
                         margin: int | None = None, threads=None,
                         level: float = 0.99) -> SurvivalEstimate:
    """Fraction of replicas not extinct by the horizon, with Wilson CIs.

    ``mode='quenched'`` runs all replicas on one graph draw;
    ``mode='annealed'`` redraws the graph for every replica.  A prebuilt
    :class:`WindowedGraph` model is always quenched.
    """
    if replicas < 100:
        raise SpecError("survival estimation needs at least 100 replicas")
    if mode not in ("annealed", "quenched"):
        raise SpecError(f"unknown mode {mode!r}")
    if isinstance(model, WindowedGraph) and mode == "annealed":
        raise SpecError("annealed estimates need a model spec, not a fixed graph")

    tallies = {"extinct": 0, "alive_at_horizon": 0, "boundary_censored": 0,
               "budget_exhausted": 0}
    if mode == "quenched":
        graph = _resolve_graph(model, window, _derived_int_seed(seed, "phase.graph", 0))
        origin = 0 if 0 in graph else (graph.lo + graph.hi) // 2
        params = SimParams(lam=lam, horizon=horizon, initial=(origin,), margin=margin)
        batch = simulate_batch(graph, params, replicas, seed, threads=threads)
        fates = batch.fates
    else:
        fates = np.empty(replicas, dtype=np.int64)
        kseeds = _rng.substream_seeds(seed, "phase.survival", replicas)
        from ._kernels import cp_run
        for i in range(replicas):
            graph = _resolve_graph(model, window, _derived_int_seed(seed, "phase.graph", i))
            origin = 0 if 0 in graph else (graph.lo + graph.hi) // 2
            indptr, indices = graph.csr()
            m = graph.margin if margin is None else int(margin)
            init = np.array([graph.index(origin)], dtype=np.int64)
            perm = np.zeros(graph.n, dtype=np.bool_)
            f, *_ = cp_run(indptr, indices, float(lam), float(horizon), init, perm,
                           np.int64(m - 1), np.int64(graph.n - m),
                           np.empty(0, dtype=np.float64), np.int64(0), kseeds[i])
            fates[i] = f
    for code, name in ((FATE_EXTINCT, "extinct"), (FATE_ALIVE, "alive_at_horizon"),
                       (FATE_CENSORED, "boundary_censored")):
        tallies[name] = int((fates == code).sum())
    up = tallies["alive_at_horizon"] + tallies["boundary_censored"]
    low = tallies["alive_at_horizon"]
    return SurvivalEstimate(
        lam=lam, window=int(window), horizon=horizon, replicas=replicas,
        mode=mode, p_upper=up / replicas,
        ci_upper=_stats.wilson_interval(up, replicas, level),
        p_lower=low / replicas,
        ci_lower=_stats.wilson_interval(low, replicas, level),
        tallies=tallies, seed=int(seed) if np.isscalar(seed) else 0)


def _derived_int_seed(master, module, index) -> int:
    return int(_rng.seed_sequence(master, module, index).generate_state(1, np.uint64)[0])


@dataclass
class SweepResult:
    """Survival matrix over a rate grid and window sizes."""

    model: dict
    lams: np.ndarray
    windows: np.ndarray
    horizons: np.ndarray
    estimates: dict            # convention -> (n_lam, n_window) array
    cis: dict                  # convention -> (n_lam, n_window, 2) array
    replicas: int
    threshold: float
    crossings: dict            # convention -> per-window first rate above threshold
    mode: str
    seed: int

    def rows(self):
        for i, lam in enumerate(self.lams):
            for j, w in enumerate(self.windows):
                yield {
                    "lam": float(lam), "window": int(w),
                    "horizon": float(self.horizons[j]),
                    "p_upper": float(self.estimates["upper"][i, j]),
                    "ci_upper_lo": float(self.cis["upper"][i, j, 0]),
                    "ci_upper_hi": float(self.cis["upper"][i, j, 1]),
                    "p_lower": float(self.estimates["lower"][i, j]),
                    "ci_lower_lo": float(self.cis["lower"][i, j, 0]),
                    "ci_lower_hi": float(self.cis["lower"][i, j, 1]),
                    "replicas": self.replicas,
                }


def lambda_sweep(model, lambda_grid, windows, horizons=None, replicas: int = 200,
                 seed=0, mode: str = "annealed", threshold: float = 0.05,
                 margin: int | None = None, threads=None,
                 level: float = 0.99) -> SweepResult:
    """Full survival matrix over (rate, window); horizons default to window/4."""
    lams = np.asarray(sorted(float(l) for l in lambda_grid))
    wins = np.asarray(sorted(int(w) for w in windows))
    if len(set(lams)) != len(lams) or len(set(wins)) != len(wins):
        raise DomainError("grids must be strictly increasing")
    hors = (np.asarray([w / 4.0 for w in wins]) if horizons is None
            else np.asarray([float(h) for h in horizons]))
    if len(hors) != len(wins):
        raise SpecError("need one horizon per window")
    est = {c: np.empty((len(lams), len(wins))) for c in ("upper", "lower")}
    cis = {c: np.empty((len(lams), len(wins), 2)) for c in ("upper", "lower")}
    for i, lam in enumerate(lams):
        for j, (w, h) in enumerate(zip(wins, hors)):
            cell_seed = _derived_int_seed(seed, "sweep.cell", i * len(wins) + j)
            s = survival_probability(model, float(lam), int(w), float(h), replicas,
                                     cell_seed, mode=mode, margin=margin,
                                     threads=threads, level=level)
            est["upper"][i, j] = s.p_upper
            est["lower"][i, j] = s.p_lower
            cis["upper"][i, j] = s.ci_upper
            cis["lower"][i, j] = s.ci_lower
    crossings = {}
    for c in ("upper", "lower"):
        per_win = []
        for j in range(len(wins)):
            above = np.nonzero(est[c][:, j] >= threshold)[0]
            per_win.append(float(lams[above[0]]) if len(above) else None)
        crossings[c] = per_win
    model_desc = spec_to_dict(model) if not isinstance(model, WindowedGraph) \
        else {"variant": "fixed_graph", "window": [model.lo, model.hi]}
    return SweepResult(model=model_desc, lams=lams, windows=wins, horizons=hors,
                       estimates=est, cis=cis, replicas=replicas,
                       threshold=threshold, crossings=crossings, mode=mode,
                       seed=int(seed))


@dataclass
class LambdaCResult:
    """Bisection bracket for the critical rate, per censoring convention."""

    brackets: dict             # convention -> (lo, hi) or None
    stable: dict               # convention -> bool
    no_finite_lambda_c: dict   # convention -> bool
    history: list
    window: int
    horizon: float
    precision: float

    @property
    def bracket(self):
        """Union of the per-convention brackets (None if neither exists)."""
        bs = [b for b in self.brackets.values() if b is not None]
        if not bs:
            return None
        return min(b[0] for b in bs), max(b[1] for b in bs)


def _bisect_once(model, bracket, precision, window, horizon, replicas, seed,
                 convention, mode, margin, threads, level, max_iters, history):
    floor = analytic_survival_floor(horizon)
    lo, hi = float(bracket[0]), float(bracket[1])

    def indicated(lam, tag):
        s = survival_probability(model, lam, window, horizon, replicas,
                                 _derived_int_seed(seed, f"lc.{convention}.{tag}", 0),
                                 mode=mode, margin=margin, threads=threads,
                                 level=level)
        history.append({"convention": convention, "lam": lam, "window": window,
                        "horizon": horizon,
                        "p": s.p_upper if convention == "upper" else s.p_lower,
                        "indicated": s.indicated(convention, floor)})
        return s.indicated(convention, floor)

    if indicated(lo, f"lo@{lo:.6g}"):
        raise BracketError(f"left end {lo} is survival-indicated; lower it")
    if not indicated(hi, f"hi@{hi:.6g}"):
        return None, True  # no finite critical rate detected on this graph scale
    it = 0
    while hi - lo > precision and it < max_iters:
        mid = 0.5 * (lo + hi)
        if indicated(mid, f"mid{it}@{mid:.6g}"):
            hi = mid
        else:
            lo = mid
        it += 1
    return (lo, hi), False


def estimate_lambda_c(model, bracket, precision: float, window: int,
                      horizon: float | None = None, replicas: int = 300,
                      seed=0, mode: str = "annealed", margin: int | None = None,
                      threads=None, level: float = 0.99,
                      max_iters: int = 30) -> LambdaCResult:
    """Bisect the survival proxy, then check stability under doubling.

    The initial bracket must have an extinction-indicated left end; a right
    end that fails to indicate survival is reported as "no finite critical
    rate detected" (finite graphs die at every rate once horizons grow).
    If the doubled-scale bracket does not overlap, the union is returned
    and flagged unstable.
    """
    if bracket[0] >= bracket[1] or bracket[0] < 0:
        raise BracketError("need 0 <= lo < hi")
    horizon = window / 4.0 if horizon is None else float(horizon)
    history: list = []
    brackets, stable, nofin = {}, {}, {}
    for conv in ("upper", "lower"):
        b1, nf1 = _bisect_once(model, bracket, precision, window, horizon,
                               replicas, seed, conv, mode, margin, threads,
                               level, max_iters, history)
        if nf1:
            brackets[conv] = None
            stable[conv] = True
            nofin[conv] = True
            continue
        b2, nf2 = _bisect_once(model, bracket, precision, 2 * window, 2 * horizon,
                               replicas, seed, conv, mode, margin, threads,
                               level, max_iters, history)
        if nf2 or b2 is None:
            brackets[conv] = b1
            stable[conv] = False
            nofin[conv] = False
            continue
        overlap = not (b1[1] < b2[0] or b2[1] < b1[0])
        if overlap:
            brackets[conv] = b1   # doubling confirmed the base-scale bracket
        else:
            brackets[conv] = (min(b1[0], b2[0]), max(b1[1], b2[1]))  # widened
        stable[conv] = overlap
        nofin[conv] = False
    return LambdaCResult(brackets=brackets, stable=stable,
                         no_finite_lambda_c=nofin, history=history,
                         window=int(window), horizon=horizon,
                         precision=float(precision))


def coupled_survival_indicators(graph: WindowedGraph, lams, horizon: float,
                                replicas: int, seed, n_samples: int = 1):
    """Pathwise-coupled survival indicators across a rate grid.

    Returns a (replicas, len(lams)) boolean array; shared clock streams make
    each row monotone in the rate exactly.  Intended for small graphs.
    """
    from .graphical import coupled_lambda_runs
    lams = sorted(float(l) for l in lams)
    origin = graph.index(0) if 0 in graph else graph.n // 2
    out = np.zeros((replicas, len(lams)), dtype=bool)
    for r in range(replicas):
        runs = coupled_lambda_runs(graph, lams, horizon, seed, init=(origin,),
                                   n_samples=n_samples, replica=r)
        for i, run in enumerate(runs):
            last = run.samples[-1]
            out[r, i] = last is not None and len(last) > 0
    return out
