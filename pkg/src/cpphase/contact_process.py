"""Exact continuous-time contact process on windowed graphs.

Infected vertices infect each susceptible neighbour at rate lambda and
recover at rate 1; permanently infected vertices never recover.  The default
engine is event-driven and exact: each infected vertex carries one pending
exponential event whose outcome splits into recovery / infection arrow by
superposition (see :mod:`cpphase._kernels`).  Replicas stop at the horizon,
at extinction (infected set equals the permanently infected set), when the
infection touches the window margin (boundary-censored), or when an event
budget runs out.

Two auxiliary processes support the block/environment analysis:

* the half-line process with a permanently infected left endpoint
  (``variant='half_line_dagger'``), and
* the right-most-particle process (``simulate_eta``): identical dynamics,
  except that at every jump of the right-most infected vertex X_t the state
  is instantly refilled to the full interval {lo, ..., X_t}.  It dominates
  the half-line process and its block-level jump chain is the comparison
  random walk used by :mod:`cpphase.coupling_rwre`.
"""
from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import rng as _rng
from ._kernels import (FATE_ALIVE, FATE_BUDGET, FATE_CENSORED, FATE_EXTINCT,
                       cp_run)
from .errors import BlockRangeError, DomainError, SpecError
from .graph_core import WindowedGraph

__all__ = [
    "SimParams", "SimOutcome", "BatchResult", "BlockProcess",
    "simulate", "simulate_batch", "simulate_eta",
    "extract_block_process", "domination_check", "resolve_threads",
]

_FATE_NAMES = {FATE_EXTINCT: "extinct", FATE_ALIVE: "alive_at_horizon",
               FATE_CENSORED: "boundary_censored", FATE_BUDGET: "budget_exhausted"}

MAX_HORIZON = 1e9  # float64 time resolution guard


def resolve_threads(threads=None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("CPPHASE_THREADS", "")
    return max(1, int(env)) if env.strip() else 1


@dataclass(frozen=True)
class SimParams:
    """Run parameters for one contact-process replica."""

    lam: float
    horizon: float
    initial: tuple
    permanently_infected: tuple = ()
    variant: str = "standard"
    sample_times: tuple = ()
    margin: int | None = None
    event_budget: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise SpecError("infection rate must be non-negative")
        if not 0 < self.horizon <= MAX_HORIZON:
            raise SpecError(f"horizon must lie in (0, {MAX_HORIZON:.0e}]")
        if len(self.initial) == 0 and len(self.permanently_infected) == 0:
            raise SpecError("initial set must be nonempty")
        if self.variant not in ("standard", "half_line_dagger", "rightmost_eta"):
            raise SpecError(f"unknown variant {self.variant!r}")
        st = np.asarray(self.sample_times, dtype=float)
        if st.size and (np.any(np.diff(st) < 0) or st[-1] > self.horizon):
            raise SpecError("sample times must be increasing and <= horizon")

    def validate_for(self, graph: WindowedGraph):
        for v in list(self.initial) + list(self.permanently_infected):
            if v not in graph:
                raise DomainError(f"vertex {v} outside window [{graph.lo}, {graph.hi}]")
        if self.variant in ("half_line_dagger", "rightmost_eta"):
            if tuple(self.permanently_infected) and graph.lo not in self.permanently_infected:
                raise SpecError("half-line variants anchor the permanently "
                                "infected set at the left window endpoint")

    def to_dict(self) -> dict:
        return {
            "lam": self.lam, "horizon": self.horizon,
            "initial": [int(v) for v in self.initial],
            "permanently_infected": [int(v) for v in self.permanently_infected],
            "variant": self.variant,
            "sample_times": [float(t) for t in self.sample_times],
            "margin": self.margin, "event_budget": self.event_budget,
        }


@dataclass
class SimOutcome:
    """One replica's fate and sampled trajectory."""

    fate: str
    t_end: float
    sample_times: np.ndarray
    infected_counts: np.ndarray    # -1 where the replica had already stopped
    rightmost: int | None
    event_count: int
    rng_stream: str
    extinction_time: float | None = None
    jumps: np.ndarray | None = None          # eta only: (t, X) jump chain
    rightmost_track: np.ndarray | None = None  # eta only: X at sample times
    returns_to_origin: int = 0

    @property
    def alive(self) -> bool:
        return self.fate in ("alive_at_horizon", "boundary_censored")


def _censor_bounds(graph, margin, variant):
    n = graph.n
    m = graph.margin if margin is None else int(margin)
    lo_idx = m - 1 if variant == "standard" else -1
    hi_idx = n - m if m > 0 else n
    return lo_idx, hi_idx, m


def simulate(graph: WindowedGraph, params: SimParams, seed) -> SimOutcome:
    """One exact replica; deterministic in (graph, params, seed)."""
    params.validate_for(graph)
    if params.variant == "rightmost_eta":
        return simulate_eta(graph, params.lam, params.horizon, seed,
                            sample_times=params.sample_times, margin=params.margin,
                            event_budget=params.event_budget)
    indptr, indices = graph.csr()
    n = graph.n
    perm = np.zeros(n, dtype=np.bool_)
    for v in params.permanently_infected:
        perm[graph.index(v)] = True
    init = np.unique(np.array(
        [graph.index(v) for v in params.initial] +
        [graph.index(v) for v in params.permanently_infected], dtype=np.int64))
    censor_lo, censor_hi, _ = _censor_bounds(graph, params.margin, params.variant)
    if np.any((init <= censor_lo) | (init >= censor_hi)):
        raise DomainError("initial set touches the censoring margin")
    st = np.asarray(params.sample_times, dtype=np.float64)
    kseed = _rng.substream_seeds(seed, "cp.sim", 1)[0]
    fate, t_end, events, counts, right_samples, rightmost, _ = cp_run(
        indptr, indices, float(params.lam), float(params.horizon), init, perm,
        np.int64(censor_lo), np.int64(censor_hi), st,
        np.int64(params.event_budget), kseed)
    rt = np.where(right_samples >= 0, right_samples + graph.lo, right_samples)
    return SimOutcome(
        fate=_FATE_NAMES[fate], t_end=float(t_end), sample_times=st,
        infected_counts=counts,
        rightmost=None if rightmost < 0 else int(rightmost) + graph.lo,
        event_count=int(events), rng_stream=_rng.stream_id(seed, "cp.sim", 0),
        extinction_time=float(t_end) if fate == FATE_EXTINCT else None,
        rightmost_track=rt)


@dataclass
class BatchResult:
    """Order-independent aggregate over replicas (arrays indexed by replica)."""

    fates: np.ndarray
    t_end: np.ndarray
    events: np.ndarray
    rightmost: np.ndarray
    counts: np.ndarray | None
    seeds: np.ndarray

    def tally(self) -> dict:
        return {name: int((self.fates == code).sum())
                for code, name in _FATE_NAMES.items()}


def simulate_batch(graph: WindowedGraph, params: SimParams, replicas: int,
                   seed, threads=None) -> BatchResult:
    """Independent replicas with per-replica derived streams.

    Results are written into position ``i`` for replica ``i``, so the output
    is byte-identical for any thread count.
    """
    params.validate_for(graph)
    indptr, indices = graph.csr()
    n = graph.n
    perm = np.zeros(n, dtype=np.bool_)
    for v in params.permanently_infected:
        perm[graph.index(v)] = True
    init = np.unique(np.array(
        [graph.index(v) for v in params.initial] +
        [graph.index(v) for v in params.permanently_infected], dtype=np.int64))
    censor_lo, censor_hi, _ = _censor_bounds(graph, params.margin, params.variant)
    if np.any((init <= censor_lo) | (init >= censor_hi)):
        raise DomainError("initial set touches the censoring margin")
    st = np.asarray(params.sample_times, dtype=np.float64)
    seeds = _rng.substream_seeds(seed, "cp.sim", replicas)
    fates = np.empty(replicas, dtype=np.int64)
    t_end = np.empty(replicas, dtype=np.float64)
    events = np.empty(replicas, dtype=np.int64)
    rightmost = np.empty(replicas, dtype=np.int64)
    counts = np.empty((replicas, len(st)), dtype=np.int64) if len(st) else None

    def run_one(i):
        f, t, ev, c, _rs, rm, _ = cp_run(indptr, indices, float(params.lam),
                                         float(params.horizon), init, perm,
                                         np.int64(censor_lo), np.int64(censor_hi),
                                         st, np.int64(params.event_budget), seeds[i])
        fates[i] = f
        t_end[i] = t
        events[i] = ev
        rightmost[i] = rm
        if counts is not None:
            counts[i] = c

    nthreads = resolve_threads(threads)
    if nthreads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            list(pool.map(run_one, range(replicas)))
    else:
        for i in range(replicas):
            run_one(i)
    return BatchResult(fates=fates, t_end=t_end, events=events,
                       rightmost=rightmost, counts=counts, seeds=seeds)


# ---------------------------------------------------------------------------
# right-most particle process
# ---------------------------------------------------------------------------


def simulate_eta(graph: WindowedGraph, lam: float, horizon: float, seed,
                 sample_times=(), margin: int | None = None,
                 event_budget: int = 0, stream_index: int = 0) -> SimOutcome:
    """Right-most-particle process on a half-line graph.

    The graph's left endpoint ``graph.lo`` is permanently infected; the run
    starts from {lo}.  Between jumps of X_t = max of the infected set the
    dynamics are the plain contact process; at every jump of X_t the state is
    refilled to the full interval {lo, ..., X_t}.  The full (t, X) jump chain
    is recorded.  The replica is censored if X reaches the right margin.
    """
    if lam < 0:
        raise SpecError("infection rate must be non-negative")
    if not 0 < horizon <= MAX_HORIZON:
        raise SpecError("horizon out of range")
    indptr, indices = graph.csr()
    n = graph.n
    gen = _rng.stream(seed, "cp.eta", stream_index)
    st = np.asarray(sample_times, dtype=float)
    m = graph.margin if margin is None else int(margin)
    censor_hi = n - m if m > 0 else n

    infected = np.zeros(n, dtype=bool)
    heap: list = []
    seq = 0

    def schedule(v, t):
        nonlocal seq
        deg = indptr[v + 1] - indptr[v]
        rate = lam * deg + (0.0 if v == 0 else 1.0)
        if rate > 0.0:
            heapq.heappush(heap, (t + gen.exponential(1.0 / rate), seq, v))
            seq += 1

    def infect(v, t):
        infected[v] = True
        schedule(v, t)

    infect(0, 0.0)
    X = 0
    n_inf = 1
    jumps = [(0.0, graph.lo)]
    returns = 0
    counts = np.full(len(st), -1, dtype=np.int64)
    xs = np.full(len(st), -1, dtype=np.int64)
    si = 0
    fate = "alive_at_horizon"
    t_end = horizon
    events = 0

    def refill(new_x, t):
        nonlocal X, n_inf, returns
        for w in range(new_x + 1):
            if not infected[w]:
                infect(w, t)
                n_inf += 1
        X = new_x
        jumps.append((t, new_x + graph.lo))
        if new_x == 0:
            returns += 1

    while heap:
        t, _, v = heapq.heappop(heap)
        if t > horizon:
            t_end = horizon
            break
        while si < len(st) and st[si] < t:
            counts[si] = n_inf
            xs[si] = X + graph.lo
            si += 1
        events += 1
        if event_budget and events > event_budget:
            fate = "budget_exhausted"
            t_end = t
            break
        deg = indptr[v + 1] - indptr[v]
        rate = lam * deg + (0.0 if v == 0 else 1.0)
        u = gen.random()
        if v != 0 and u * rate < 1.0:
            infected[v] = False
            n_inf -= 1
            if v == X:
                w = v - 1
                while not infected[w]:
                    w -= 1
                refill(w, t)
        else:
            j = min(int(gen.random() * deg), deg - 1)
            w = int(indices[indptr[v] + j])
            if not infected[w]:
                if w >= censor_hi:
                    fate = "boundary_censored"
                    t_end = t
                    break
                infect(w, t)
                n_inf += 1
                if w > X:
                    refill(w, t)
            schedule(v, t)

    if fate == "alive_at_horizon":
        while si < len(st) and st[si] <= horizon:
            counts[si] = n_inf
            xs[si] = X + graph.lo
            si += 1
    return SimOutcome(
        fate=fate, t_end=t_end, sample_times=st, infected_counts=counts,
        rightmost=X + graph.lo, event_count=events,
        rng_stream=_rng.stream_id(seed, "cp.eta", stream_index),
        jumps=np.asarray(jumps, dtype=float), rightmost_track=xs,
        returns_to_origin=returns)


@dataclass
class BlockProcess:
    """Block-level jump chain of the right-most particle.

    ``z[n]`` is the block index after the n-th block jump.  Upward steps are
    provably +1 for thinned decompositions (crossing edges cannot skip a
    block); downward steps can span several blocks when a whole stretch
    recovers before its right-most vertex, so only upward skips are treated
    as errors.  ``exits_up[b]`` / ``exits_down[b]`` count moves out of block b.
    """

    z: np.ndarray
    times: np.ndarray
    up_skips: int
    down_multis: int
    exits_up: np.ndarray
    exits_down: np.ndarray

    @property
    def n_steps(self) -> int:
        return max(len(self.z) - 1, 0)


def extract_block_process(outcome: SimOutcome, decomp) -> BlockProcess:
    """Coarse-grain an eta jump chain to the block level."""
    if outcome.jumps is None:
        raise DomainError("outcome carries no jump chain; run simulate_eta")
    ts = outcome.jumps[:, 0]
    xs = outcome.jumps[:, 1].astype(np.int64)
    cuts = decomp.cut_points
    bid = np.searchsorted(cuts, xs, side="right") - 1
    if np.any(bid < 0) or np.any(bid >= decomp.n_blocks):
        keep = (bid >= 0) & (bid < decomp.n_blocks)
        first_bad = int(np.argmin(keep))
        partial = extract_block_process(
            SimOutcome(**{**outcome.__dict__, "jumps": outcome.jumps[:first_bad]}),
            decomp) if first_bad > 1 else None
        raise BlockRangeError(
            f"trajectory left the decomposed range at t={ts[~keep][0]:.4g}",
            partial=partial)
    change = np.nonzero(np.diff(bid))[0] + 1
    z = np.concatenate([[bid[0]], bid[change]])
    times = np.concatenate([[ts[0]], ts[change]])
    dz = np.diff(z)
    up_skips = int(np.sum(dz > 1))
    down_multis = int(np.sum(dz < -1))
    nb = decomp.n_blocks
    exits_up = np.zeros(nb, dtype=np.int64)
    exits_down = np.zeros(nb, dtype=np.int64)
    if len(dz):
        src = z[:-1]
        np.add.at(exits_up, src[dz > 0], 1)
        np.add.at(exits_down, src[dz < 0], 1)
    if decomp.thinned and up_skips:
        raise BlockRangeError(
            f"{up_skips} upward block skips in a thinned decomposition "
            "(crossing edges must land in the adjacent block)")
    return BlockProcess(z=z, times=times, up_skips=up_skips,
                        down_multis=down_multis, exits_up=exits_up,
                        exits_down=exits_down)


def domination_check(graph: WindowedGraph, lam: float, horizon: float, seed,
                     n_samples: int = 20, replicas: int = 1):
    """Couple the half-line process and the right-most-particle process on
    identical clock streams and check containment at all sample times."""
    from .graphical import coupled_dagger_eta
    return coupled_dagger_eta(graph, lam, horizon, seed,
                              n_samples=n_samples, replicas=replicas)
