"""Compiled event loops: contact process on CSR graphs, aggregated stars,
lattice Boolean edge construction, and the reflected random walk.

All kernels draw randomness from an in-kernel splitmix64 state seeded with a
uint64 derived upstream (see :mod:`cpphase.rng`), so a kernel call is a pure
function of its arguments and results are identical under any thread count.
"""
from __future__ import annotations

import numpy as np
from numba import njit, uint64

# fate codes shared with contact_process
FATE_EXTINCT = 0
FATE_ALIVE = 1
FATE_CENSORED = 2
FATE_BUDGET = 3

_GAMMA = uint64(0x9E3779B97F4A7C15)
_M1 = uint64(0xBF58476D1CE4E5B9)
_M2 = uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(inline="always")
def _u01(state):
    """(uniform in [0,1), new state) -- splitmix64 step."""
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> uint64(30))) * _M1
    z = (z ^ (z >> uint64(27))) * _M2
    z = z ^ (z >> uint64(31))
    return (z >> uint64(11)) * _INV53, state


@njit(inline="always")
def _heap_push(heap_t, heap_v, size, t, v):
    i = size
    heap_t[i] = t
    heap_v[i] = v
    while i > 0:
        p = (i - 1) >> 1
        if heap_t[p] <= heap_t[i]:
            break
        heap_t[p], heap_t[i] = heap_t[i], heap_t[p]
        heap_v[p], heap_v[i] = heap_v[i], heap_v[p]
        i = p
    return size + 1


@njit(inline="always")
def _heap_pop(heap_t, heap_v, size):
    t = heap_t[0]
    v = heap_v[0]
    size -= 1
    if size > 0:
        heap_t[0] = heap_t[size]
        heap_v[0] = heap_v[size]
        i = 0
        while True:
            l = 2 * i + 1
            if l >= size:
                break
            c = l
            r = l + 1
            if r < size and heap_t[r] < heap_t[l]:
                c = r
            if heap_t[i] <= heap_t[c]:
                break
            heap_t[i], heap_t[c] = heap_t[c], heap_t[i]
            heap_v[i], heap_v[c] = heap_v[c], heap_v[i]
            i = c
    return t, v, size


@njit(cache=True, nogil=True)
def cp_run(indptr, indices, lam, horizon, init_idx, perm, censor_lo, censor_hi,
           sample_times, budget, seed):
    """One exact contact-process path on a CSR graph.

    Each infected vertex carries a single pending event at rate
    ``1 + lam * deg`` (``lam * deg`` for permanently infected vertices); on
    firing it is a recovery with probability ``1/rate``, otherwise an
    infection arrow along a uniform incident edge.  Arrows towards already
    infected targets are no-ops.  By superposition and memorylessness this
    samples exactly the same law as per-edge exponential clocks.

    Infecting a vertex with index <= censor_lo or >= censor_hi stops the
    replica as boundary-censored.  Returns ``(fate, t_end, events,
    counts_at_samples, rightmost_at_samples, rightmost_idx, n_inf)`` where
    the rightmost entries are the largest index reached so far.
    """
    n = indptr.size - 1
    state = seed
    infected = np.zeros(n, np.bool_)
    heap_t = np.empty(n + 1, np.float64)
    heap_v = np.empty(n + 1, np.int64)
    size = 0

    n_perm = 0
    for i in range(n):
        if perm[i]:
            n_perm += 1

    n_inf = 0
    rightmost = np.int64(-1)
    for j in range(init_idx.size):
        v = init_idx[j]
        if not infected[v]:
            infected[v] = True
            n_inf += 1
            if v > rightmost:
                rightmost = v
    for v in range(n):
        if infected[v]:
            deg = indptr[v + 1] - indptr[v]
            rate = lam * deg + (0.0 if perm[v] else 1.0)
            if rate > 0.0:
                u, state = _u01(state)
                size = _heap_push(heap_t, heap_v, size, -np.log(1.0 - u) / rate, v)

    nsamp = sample_times.size
    counts = np.full(nsamp, -1, np.int64)
    right_samples = np.full(nsamp, -1, np.int64)
    si = 0
    t_end = horizon
    fate = FATE_ALIVE
    events = np.int64(0)

    if n_inf == n_perm:
        fate = FATE_EXTINCT
        t_end = 0.0
        size = 0

    while size > 0:
        t, v, size = _heap_pop(heap_t, heap_v, size)
        if t > horizon:
            t_end = horizon
            break
        while si < nsamp and sample_times[si] < t:
            counts[si] = n_inf
            right_samples[si] = rightmost
            si += 1
        events += 1
        if budget > 0 and events > budget:
            fate = FATE_BUDGET
            t_end = t
            break
        deg = indptr[v + 1] - indptr[v]
        rate = lam * deg + (0.0 if perm[v] else 1.0)
        u, state = _u01(state)
        if (not perm[v]) and u * rate < 1.0:
            infected[v] = False
            n_inf -= 1
            if n_inf == n_perm:
                fate = FATE_EXTINCT
                t_end = t
                break
        else:
            u2, state = _u01(state)
            j = np.int64(u2 * deg)
            if j >= deg:
                j = deg - 1
            w = indices[indptr[v] + j]
            if not infected[w]:
                if w <= censor_lo or w >= censor_hi:
                    fate = FATE_CENSORED
                    t_end = t
                    break
                infected[w] = True
                n_inf += 1
                if w > rightmost:
                    rightmost = w
                wdeg = indptr[w + 1] - indptr[w]
                wrate = lam * wdeg + (0.0 if perm[w] else 1.0)
                if wrate > 0.0:
                    u3, state = _u01(state)
                    size = _heap_push(heap_t, heap_v, size,
                                      t - np.log(1.0 - u3) / wrate, w)
            u4, state = _u01(state)
            size = _heap_push(heap_t, heap_v, size, t - np.log(1.0 - u4) / rate, v)

    if fate == FATE_EXTINCT or fate == FATE_ALIVE:
        while si < nsamp and sample_times[si] <= horizon:
            counts[si] = n_inf
            right_samples[si] = rightmost
            si += 1
    return fate, t_end, events, counts, right_samples, rightmost, n_inf


@njit(cache=True, nogil=True)
def star_run(k, lam, root0, leaves0, t_lo, horizon, threshold, early_stop,
             budget, seed):
    """Aggregated contact process on a star with ``k`` leaves.

    State is (root infected?, number of infected leaves); the four aggregate
    channels (root recovery, leaf recovery, root->leaf infection, leaf->root
    infection) reproduce the vertex-level law exactly.  Tracks the minimum of
    the total infected count over ``[t_lo, horizon]`` and the extinction time.

    Returns ``(min_in_window, extinction_time, budget_hit, events)`` with
    ``extinction_time = -1.0`` when still alive at the horizon.  If
    ``early_stop`` and ``threshold >= 0``, the run stops as soon as the
    window minimum drops below the threshold.
    """
    state = seed
    root = 1 if root0 else 0
    ninf = leaves0
    t = 0.0
    min_in_window = np.int64(k + 2)
    ext_time = -1.0
    budget_hit = 0
    events = np.int64(0)

    while True:
        total = root + ninf
        if total == 0:
            ext_time = t
            if t <= horizon and horizon >= t_lo:
                min_in_window = 0
            break
        r_root_rec = 1.0 if root == 1 else 0.0
        r_leaf_rec = float(ninf)
        r_r2l = lam * (k - ninf) if root == 1 else 0.0
        r_l2r = lam * ninf if root == 0 else 0.0
        rate = r_root_rec + r_leaf_rec + r_r2l + r_l2r
        u, state = _u01(state)
        t_next = t - np.log(1.0 - u) / rate
        seg_hi = t_next if t_next < horizon else horizon
        if seg_hi > t_lo and t <= horizon:
            if total < min_in_window:
                min_in_window = total
                if early_stop and threshold >= 0 and min_in_window < threshold:
                    t = seg_hi
                    break
        if t_next > horizon:
            t = horizon
            break
        t = t_next
        events += 1
        if budget > 0 and events > budget:
            budget_hit = 1
            break
        u2, state = _u01(state)
        x = u2 * rate
        if x < r_root_rec:
            root = 0
        elif x < r_root_rec + r_leaf_rec:
            ninf -= 1
        elif x < r_root_rec + r_leaf_rec + r_r2l:
            ninf += 1
        else:
            root = 1
    if min_in_window > k + 1:
        min_in_window = root + ninf
    return min_in_window, ext_time, budget_hit, events


@njit(cache=True)
def lattice_edges(coords, radii, order, rank, offsets, norms, shape, strides):
    """Edges of the lattice Boolean graph: sites z, v joined iff
    ``|z - v| <= r_z + r_v`` (Euclidean).

    Sites are processed in decreasing radius order; every valid pair satisfies
    ``|z - v| <= 2 r_z`` for its larger-radius endpoint z, so scanning the
    pre-sorted offset table up to that norm finds each pair exactly once.
    """
    n = coords.shape[0]
    d = coords.shape[1]
    cap = 16 * n + 1024
    eu = np.empty(cap, np.int64)
    ev = np.empty(cap, np.int64)
    cnt = 0
    for pos in range(n):
        z = order[pos]
        rz = radii[z]
        hi = np.searchsorted(norms, 2.0 * rz, side="right")
        for m in range(1, hi):
            flat = np.int64(0)
            ok = True
            for dd in range(d):
                c = coords[z, dd] + offsets[m, dd]
                if c < 0 or c >= shape[dd]:
                    ok = False
                    break
                flat += c * strides[dd]
            if not ok:
                continue
            if rank[flat] <= pos:
                continue
            if norms[m] <= rz + radii[flat]:
                if cnt == cap:
                    cap *= 2
                    eu2 = np.empty(cap, np.int64)
                    ev2 = np.empty(cap, np.int64)
                    eu2[:cnt] = eu
                    ev2[:cnt] = ev
                    eu = eu2
                    ev = ev2
                eu[cnt] = z
                ev[cnt] = flat
                cnt += 1
    return eu[:cnt].copy(), ev[:cnt].copy()


@njit(cache=True, nogil=True)
def rwre_walk(omega_left, steps, seed):
    """Reflected walk on {0, 1, ..., len(omega_left)}.

    At 0 the walk moves to 1 deterministically; at x >= 1 it steps left with
    probability ``omega_left[x-1]``, right otherwise.  Stops early if it
    steps past the supplied environment.

    Returns ``(final_x, returns_to_origin, max_excursion, steps_done, hit_end)``.
    """
    state = seed
    x = np.int64(0)
    returns = np.int64(0)
    maxx = np.int64(0)
    L = omega_left.size
    hit_end = 0
    done = steps
    for s in range(steps):
        if x == 0:
            x = 1
        else:
            u, state = _u01(state)
            if u < omega_left[x - 1]:
                x -= 1
            else:
                x += 1
                if x > L:
                    hit_end = 1
                    done = s + 1
                    break
        if x == 0:
            returns += 1
        if x > maxx:
            maxx = x
    return x, returns, maxx, done, hit_end
