"""Windowed graphs on integer vertex sets.

A :class:`WindowedGraph` is the finite restriction of a graph on the integers
to a window ``[lo, hi]``: vertices are all integers in the window, edges are
unordered integer pairs inside it.  The boundary is free — edges with an
endpoint outside the window are never materialised, and diagnostics that are
biased near the boundary are only reported for vertices at distance at least
``margin`` from it (default: window length / 10).

Optional per-vertex data: ``positions`` (strictly increasing real coordinates)
and ``marks`` (uniform weights in (0,1), or radii >= 0, depending on the
ensemble).  ``augmented`` records that every nearest-neighbour link
``{z-1, z}`` is present.

:class:`LatticeGraph` is the analogous object on a d-dimensional integer box
(d >= 2), used by the lattice Boolean ensemble.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SpecError

__all__ = [
    "GraphStats",
    "WindowedGraph",
    "LatticeGraph",
    "path_graph",
    "star_window_graph",
    "write_edge_file",
    "read_edge_file",
]


@dataclass(frozen=True)
class GraphStats:
    """Window-level degree/edge-density summary."""

    n: int
    edge_count: int
    empirical_mean_degree: float
    delta_hat: float


def _canonical_edges(edges, lo: int, hi: int) -> np.ndarray:
    """Sort each pair, deduplicate, lexsort; validate endpoints and loops."""
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    u = np.minimum(arr[:, 0], arr[:, 1])
    v = np.maximum(arr[:, 0], arr[:, 1])
    if np.any(u == v):
        raise SpecError("self-loops are not allowed")
    if u.min() < lo or v.max() > hi:
        raise DomainError("edge endpoint outside the window")
    stacked = np.stack([u, v], axis=1)
    stacked = np.unique(stacked, axis=0)
    return stacked


class WindowedGraph:
    """Immutable graph on the integer window ``[lo, hi]``.

    Adjacency is stored both as the canonical edge array and as per-vertex
    sorted neighbour lists (CSR); the two are built from the same array and
    can be cross-checked with :meth:`adjacency_consistent`.
    """

    def __init__(self, lo, hi, edges=(), positions=None, marks=None, augmented=False):
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise DomainError(f"empty window [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.edges = _canonical_edges(edges, lo, hi)
        self.augmented = bool(augmented)

        n = self.n
        self.positions = None
        if positions is not None:
            pos = np.asarray(positions, dtype=np.float64)
            if pos.shape != (n,):
                raise SpecError(f"positions must have one entry per vertex ({n})")
            if np.any(np.diff(pos) <= 0):
                raise SpecError("positions must be strictly increasing in the vertex index")
            self.positions = pos
        self.marks = None
        if marks is not None:
            mk = np.asarray(marks, dtype=np.float64)
            if mk.shape != (n,):
                raise SpecError(f"marks must have one entry per vertex ({n})")
            if np.any(mk < 0):
                raise SpecError("marks must be non-negative")
            self.marks = mk

        self._indptr, self._indices = self._build_csr()
        if self.augmented and n > 1:
            nn = self.edges[self.edges[:, 1] - self.edges[:, 0] == 1]
            if len(nn) != n - 1:
                raise SpecError("augmented graph is missing nearest-neighbour links")
        for a in (self.edges, self._indptr, self._indices, self.positions, self.marks):
            if a is not None:
                a.setflags(write=False)

    # -- construction helpers -------------------------------------------------

    def _build_csr(self):
        n = self.n
        if len(self.edges) == 0:
            return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
        u = self.edges[:, 0] - self.lo
        v = self.edges[:, 1] - self.lo
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, dst

    # -- basic queries ---------------------------------------------------------

    @property
    def n(self) -> int:
        return self.hi - self.lo + 1

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def margin(self) -> int:
        return self.n // 10

    def vertices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def __contains__(self, v) -> bool:
        return self.lo <= int(v) <= self.hi

    def index(self, v) -> int:
        if v not in self:
            raise DomainError(f"vertex {v} outside window [{self.lo}, {self.hi}]")
        return int(v) - self.lo

    def neighbors(self, v) -> np.ndarray:
        i = self.index(v)
        return self._indices[self._indptr[i]:self._indptr[i + 1]] + self.lo

    def degree(self, v) -> int:
        i = self.index(v)
        return int(self._indptr[i + 1] - self._indptr[i])

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def has_edge(self, u, v) -> bool:
        if u not in self or v not in self:
            return False
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return k < len(nb) and nb[k] == v

    def csr(self):
        """(indptr, indices) over 0-based vertex indices, neighbours sorted."""
        return self._indptr, self._indices

    def adjacency_consistent(self) -> bool:
        """Rebuild the neighbour lists from the edge array and compare."""
        indptr, indices = self._build_csr()
        return np.array_equal(indptr, self._indptr) and np.array_equal(indices, self._indices)

    def position(self, v) -> float:
        if self.positions is None:
            raise DomainError("graph carries no positions")
        return float(self.positions[self.index(v)])

    def mark(self, v) -> float:
        if self.marks is None:
            raise DomainError("graph carries no marks")
        return float(self.marks[self.index(v)])

    # -- operations ------------------------------------------------------------

    def edge_density(self, margin: int | None = None) -> GraphStats:
        """Edge count and density of the induced window graph.

        ``delta_hat = 2 * E_n / n`` estimates the mean degree of the infinite
        graph; ``empirical_mean_degree`` averages observed degrees over the
        margin-interior vertices only (the boundary-corrected version).
        """
        n = self.n
        m = self.margin if margin is None else int(margin)
        delta_hat = 2.0 * self.edge_count / n
        degs = self.degrees()
        interior = degs[m:n - m] if n > 2 * m else degs
        mean_deg = float(interior.mean()) if len(interior) else 0.0
        return GraphStats(n=n, edge_count=self.edge_count,
                          empirical_mean_degree=mean_deg, delta_hat=delta_hat)

    def induced_subgraph(self, interval) -> "WindowedGraph":
        """Restriction to ``[a, b]``: exactly the edges with both endpoints inside."""
        a, b = int(interval[0]), int(interval[1])
        if a > b:
            raise DomainError(f"empty interval [{a}, {b}]")
        if a < self.lo or b > self.hi:
            raise DomainError(f"interval [{a}, {b}] not contained in window [{self.lo}, {self.hi}]")
        if len(self.edges):
            keep = (self.edges[:, 0] >= a) & (self.edges[:, 1] <= b)
            sub_edges = self.edges[keep]
        else:
            sub_edges = self.edges
        sl = slice(a - self.lo, b - self.lo + 1)
        return WindowedGraph(
            a, b, sub_edges,
            positions=None if self.positions is None else self.positions[sl],
            marks=None if self.marks is None else self.marks[sl],
            augmented=self.augmented,
        )

    def __repr__(self):
        return (f"WindowedGraph([{self.lo}, {self.hi}], edges={self.edge_count}, "
                f"augmented={self.augmented})")


# -- convenience constructors ----------------------------------------------


def path_graph(lo: int, hi: int) -> WindowedGraph:
    """Nearest-neighbour path on the window."""
    zs = np.arange(lo, hi, dtype=np.int64)
    edges = np.stack([zs, zs + 1], axis=1)
    return WindowedGraph(lo, hi, edges, augmented=True)


def star_window_graph(k: int) -> WindowedGraph:
    """Star with centre 0 and leaves 1..k on the window [0, k]."""
    if k < 1:
        raise DomainError("need at least one leaf")
    leaves = np.arange(1, k + 1, dtype=np.int64)
    edges = np.stack([np.zeros(k, dtype=np.int64), leaves], axis=1)
    return WindowedGraph(0, k, edges, augmented=False)


# -- edge-list text format ---------------------------------------------------
#
#   #window <lo> <hi> augmented=<0|1>
#   #pos <v> <x>          (one line per vertex, only if positions present)
#   #mark <v> <u>         (one line per vertex, only if marks present)
#   <u> <v>               (one line per edge, u < v)
#
# Integers round-trip exactly; reals are written with 17 significant digits.


def graph_to_text(graph: WindowedGraph) -> str:
    lines = [f"#window {graph.lo} {graph.hi} augmented={1 if graph.augmented else 0}"]
    if graph.positions is not None:
        for v, x in zip(graph.vertices(), graph.positions):
            lines.append(f"#pos {v} {x:.17g}")
    if graph.marks is not None:
        for v, u in zip(graph.vertices(), graph.marks):
            lines.append(f"#mark {v} {u:.17g}")
    for u, v in graph.edges:
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> WindowedGraph:
    lo = hi = None
    augmented = False
    pos_entries, mark_entries, edges = [], [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#window"):
            parts = line.split()
            lo, hi = int(parts[1]), int(parts[2])
            augmented = parts[3].split("=")[1] == "1"
        elif line.startswith("#pos"):
            _, v, x = line.split()
            pos_entries.append((int(v), float(x)))
        elif line.startswith("#mark"):
            _, v, u = line.split()
            mark_entries.append((int(v), float(u)))
        elif line.startswith("#"):
            continue
        else:
            u, v = line.split()
            edges.append((int(u), int(v)))
    if lo is None:
        raise SpecError("edge-list text lacks a #window header")
    n = hi - lo + 1
    positions = marks = None
    if pos_entries:
        positions = np.full(n, np.nan)
        for v, x in pos_entries:
            positions[v - lo] = x
    if mark_entries:
        marks = np.full(n, np.nan)
        for v, u in mark_entries:
            marks[v - lo] = u
    return WindowedGraph(lo, hi, edges, positions=positions, marks=marks, augmented=augmented)


def lattice_to_text(graph: "LatticeGraph") -> str:
    """Lattice variant of the edge-list format: ``#box <s1> ... <sd>`` header,
    ``#mark <site> <u>`` lines, then flat-index edge pairs."""
    lines = ["#box " + " ".join(str(s) for s in graph.shape)]
    if graph.marks is not None:
        for i, u in enumerate(graph.marks):
            lines.append(f"#mark {i} {u:.17g}")
    for u, v in graph.edges:
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def lattice_from_text(text: str) -> "LatticeGraph":
    shape = None
    mark_entries, edges = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#box"):
            shape = tuple(int(s) for s in line.split()[1:])
        elif line.startswith("#mark"):
            _, v, u = line.split()
            mark_entries.append((int(v), float(u)))
        elif line.startswith("#"):
            continue
        else:
            u, v = line.split()
            edges.append((int(u), int(v)))
    if shape is None:
        raise SpecError("lattice text lacks a #box header")
    marks = None
    if mark_entries:
        marks = np.full(int(np.prod(shape)), np.nan)
        for v, u in mark_entries:
            marks[v] = u
    return LatticeGraph(shape, edges, marks=marks)


def write_edge_file(graph, path) -> None:
    text = lattice_to_text(graph) if isinstance(graph, LatticeGraph) \
        else graph_to_text(graph)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text)


def read_edge_file(path):
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    for line in text.splitlines():
        if line.startswith("#box"):
            return lattice_from_text(text)
        if line.startswith("#window"):
            return graph_from_text(text)
    raise SpecError(f"{path}: not a recognised edge-list file")


# -- lattice graphs (d >= 2) -------------------------------------------------


class LatticeGraph:
    """Graph on the sites of a d-dimensional integer box.

    Sites are indexed in C order over the box; ``coords`` recovers the
    multi-index of a flat site index.  Used by the lattice Boolean ensemble
    and the box renormalisation diagnostics.
    """

    def __init__(self, shape, edges=(), marks=None):
        self.shape = tuple(int(s) for s in shape)
        if len(self.shape) < 2:
            raise SpecError("lattice graphs require dimension d >= 2")
        if any(s < 1 for s in self.shape):
            raise DomainError("empty box")
        self.d = len(self.shape)
        n = int(np.prod(self.shape))
        self.n_sites = n
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                         dtype=np.int64).reshape(-1, 2)
        if arr.size:
            u = np.minimum(arr[:, 0], arr[:, 1])
            v = np.maximum(arr[:, 0], arr[:, 1])
            if np.any(u == v):
                raise SpecError("self-loops are not allowed")
            if u.min() < 0 or v.max() >= n:
                raise DomainError("edge endpoint outside the box")
            arr = np.unique(np.stack([u, v], axis=1), axis=0)
        else:
            arr = np.empty((0, 2), dtype=np.int64)
        self.edges = arr
        self.marks = None
        if marks is not None:
            mk = np.asarray(marks, dtype=np.float64).reshape(-1)
            if mk.shape != (n,):
                raise SpecError("marks must have one entry per site")
            self.marks = mk
        self._indptr, self._indices = self._build_csr()
        for a in (self.edges, self._indptr, self._indices, self.marks):
            if a is not None:
                a.setflags(write=False)

    def _build_csr(self):
        n = self.n_sites
        if len(self.edges) == 0:
            return np.zeros(n + 1, dtype=np.int64), np.empty(0, dtype=np.int64)
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, dst

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def coords(self, idx) -> tuple:
        return tuple(int(c) for c in np.unravel_index(int(idx), self.shape))

    def site_index(self, coord) -> int:
        return int(np.ravel_multi_index(tuple(int(c) for c in coord), self.shape))

    def all_coords(self) -> np.ndarray:
        """(n_sites, d) array of site multi-indices, C order."""
        grids = np.indices(self.shape).reshape(self.d, -1).T
        return grids.astype(np.int64)

    def degree(self, idx) -> int:
        i = int(idx)
        if not 0 <= i < self.n_sites:
            raise DomainError("site index outside the box")
        return int(self._indptr[i + 1] - self._indptr[i])

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def neighbors(self, idx) -> np.ndarray:
        i = int(idx)
        if not 0 <= i < self.n_sites:
            raise DomainError("site index outside the box")
        return self._indices[self._indptr[i]:self._indptr[i + 1]]

    def csr(self):
        return self._indptr, self._indices

    def mean_degree(self) -> float:
        return 2.0 * self.edge_count / self.n_sites

    def __repr__(self):
        return f"LatticeGraph(shape={self.shape}, edges={self.edge_count})"
