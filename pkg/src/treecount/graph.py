"""Undirected graphs in compressed sparse row form, edge-list I/O and RMAT."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

VERTEX_DTYPE = np.uint32
INDEX_DTYPE = np.int64
MAX_VERTEX_ID = int(np.iinfo(VERTEX_DTYPE).max) - 1

COMMENT_PREFIXES = ("#", "%")
# optional header written by save_edge_list so trailing isolated vertices survive a round trip
HEADER_KEY = "vertices"


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``offsets[v]:offsets[v + 1]`` slices ``adjacency`` to give the sorted
    neighbours of ``v``. Both directions of every edge are stored.
    """

    n: int
    offsets: np.ndarray
    adjacency: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "m", int(self.offsets[-1]) // 2 if len(self.offsets) else 0)
        self.offsets.setflags(write=False)
        self.adjacency.setflags(write=False)

    @classmethod
    def from_edges(cls, n, src, dst):
        """Build a graph from (possibly dirty) edge arrays.

        Self-loops and repeated edges in either direction are removed.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("edge endpoint outside [0, n)")
        keep = src != dst
        lo = np.minimum(src[keep], dst[keep])
        hi = np.maximum(src[keep], dst[keep])
        if n < 1 << 31:
            undirected = np.unique(lo * max(n, 1) + hi)
            lo, hi = np.divmod(undirected, max(n, 1))
        else:
            pairs = np.unique(np.column_stack([lo, hi]), axis=0)
            lo, hi = pairs[:, 0], pairs[:, 1]
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        offsets = np.zeros(n + 1, dtype=INDEX_DTYPE)
        np.cumsum(np.bincount(rows, minlength=n), out=offsets[1:])
        return cls(n, offsets, cols.astype(VERTEX_DTYPE))

    @classmethod
    def empty(cls, n):
        return cls.from_edges(n, [], [])

    def neighbors(self, v):
        return self.adjacency[self.offsets[v]:self.offsets[v + 1]]

    def degrees(self):
        return np.diff(self.offsets)

    def edges(self):
        """Each undirected edge once, as an ``(m, 2)`` array with ``u < v``."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        cols = self.adjacency.astype(np.int64)
        mask = rows < cols
        return np.column_stack([rows[mask], cols[mask]])

    @cached_property
    def csr(self):
        """0/1 adjacency as a scipy CSR matrix (rows kept in stored neighbour order)."""
        data = np.ones(len(self.adjacency), dtype=np.float64)
        return sp.csr_matrix(
            (data, self.adjacency.astype(np.int64), self.offsets), shape=(self.n, self.n)
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.adjacency, other.adjacency)
        )

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def check_invariants(g):
    """Return a list of human-readable invariant violations (empty when valid)."""
    problems = []
    off = g.offsets
    if len(off) != g.n + 1:
        problems.append("offsets length is not n + 1")
        return problems
    if off[0] != 0:
        problems.append("offsets[0] != 0")
    if np.any(np.diff(off) < 0):
        problems.append("offsets not nondecreasing")
    if off[-1] != 2 * g.m or off[-1] != len(g.adjacency):
        problems.append("offsets[n] != 2m")
    adj = g.adjacency.astype(np.int64)
    if adj.size and (adj.min() < 0 or adj.max() >= g.n):
        problems.append("neighbour id out of range")
        return problems
    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(off))
    if np.any(rows == adj):
        problems.append("self-loop present")
    same_row = rows[1:] == rows[:-1]
    if np.any(same_row & (adj[1:] <= adj[:-1])):
        problems.append("neighbour list not strictly ascending")
    forward = set(zip(rows.tolist(), adj.tolist()))
    asym = sum(1 for u, v in forward if (v, u) not in forward)
    if asym:
        problems.append(f"{asym} asymmetric adjacency entries")
    return problems


@dataclass(frozen=True)
class LoadReport:
    lines: int
    edges_read: int
    self_loops: int
    duplicates: int

    @property
    def dropped(self):
        return self.self_loops + self.duplicates


def _parse_header(line):
    parts = line[1:].split()
    if len(parts) == 2 and parts[0] == HEADER_KEY:
        try:
            return int(parts[1])
        except ValueError:
            return None
    return None


def read_edge_pairs(path):
    """Parse an edge-list file into ``(src, dst, declared_n, line_count)``."""
    src, dst = [], []
    declared_n = None
    lineno = 0
    try:
        fh = open(path, "r", encoding="ascii", errors="strict")
    except OSError as exc:
        raise GraphFormatError(f"cannot read {os.fspath(path)!s}: {exc.strerror}") from exc
    with fh:
        try:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                if stripped.startswith(COMMENT_PREFIXES):
                    header = _parse_header(stripped)
                    if header is not None:
                        declared_n = header
                    continue
                tokens = stripped.split()
                if len(tokens) != 2:
                    raise GraphFormatError(
                        f"line {lineno}: expected two vertex ids, got {len(tokens)} tokens"
                    )
                ids = []
                for tok in tokens:
                    if not tok.isdigit():
                        raise GraphFormatError(f"line {lineno}: malformed vertex id {tok!r}")
                    value = int(tok)
                    if value > MAX_VERTEX_ID:
                        raise GraphFormatError(
                            f"line {lineno}: vertex id {value} overflows 32-bit id type"
                        )
                    ids.append(value)
                src.append(ids[0])
                dst.append(ids[1])
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"line {lineno + 1}: non-ASCII content") from exc
    return (
        np.asarray(src, dtype=np.int64),
        np.asarray(dst, dtype=np.int64),
        declared_n,
        lineno,
    )


def load_edge_list(path):
    """Load an undirected edge list.

    Returns ``(graph, report)``; ``report`` counts self-loop and duplicate
    lines that were dropped.
    """
    src, dst, declared_n, lines = read_edge_pairs(path)
    n = int(max(src.max(initial=-1), dst.max(initial=-1))) + 1
    if declared_n is not None:
        n = max(n, declared_n)
    g = Graph.from_edges(n, src, dst)
    loops = int(np.count_nonzero(src == dst))
    report = LoadReport(
        lines=lines,
        edges_read=len(src),
        self_loops=loops,
        duplicates=len(src) - loops - g.m,
    )
    return g, report


def save_edge_list(g, path):
    """Write ``g`` with a vertex-count header and each edge once as ``u v`` (u < v)."""
    edges = g.edges()
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# {HEADER_KEY} {g.n}\n")
        if len(edges):
            np.savetxt(fh, edges, fmt="%d")


def rmat_edges(scale, edges, a=0.57, b=0.19, c=0.19, d=0.05, seed=0):
    """Raw RMAT draws (before dedup) as ``(src, dst)`` int64 arrays.

    Each edge descends ``scale`` levels; at every level one uniform draw picks
    a quadrant: a = top-left, b = top-right, c = bottom-left, d = bottom-right.
    The most significant bit is decided first.
    """
    if edges < 0:
        raise ValueError("edges must be nonnegative")
    if scale < 1:
        raise ValueError("scale must be at least 1")
    probs = np.array([a, b, c, d], dtype=np.float64)
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"quadrant probabilities must be nonnegative and sum to 1, got {probs.sum()!r}")
    rng = np.random.default_rng(seed)
    draws = rng.random((edges, scale))
    # quadrant index 0..3 per level
    quadrant = np.searchsorted(np.cumsum(probs)[:3], draws, side="right")
    row_bit = (quadrant >= 2).astype(np.int64)
    col_bit = (quadrant % 2).astype(np.int64)
    weights = np.left_shift(1, np.arange(scale - 1, -1, -1, dtype=np.int64))
    return row_bit @ weights, col_bit @ weights


def rmat_generate(scale, edges, a=0.57, b=0.19, c=0.19, d=0.05, seed=0):
    """RMAT graph on ``2**scale`` vertices; duplicates and self-loops are dropped."""
    src, dst = rmat_edges(scale, edges, a, b, c, d, seed)
    return Graph.from_edges(1 << scale, src, dst)


@dataclass(frozen=True)
class DegreeStats:
    min: int
    max: int
    mean: float
    isolated: int


def degree_stats(g):
    deg = g.degrees()
    if g.n == 0:
        return DegreeStats(0, 0, 0.0, 0)
    return DegreeStats(
        min=int(deg.min()),
        max=int(deg.max()),
        mean=float(2 * g.m / g.n),
        isolated=int(np.count_nonzero(deg == 0)),
    )
