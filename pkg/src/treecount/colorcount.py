"""Color-coding counts of tree templates.

One iteration colors every vertex with one of ``k = t`` colors, then runs a
bottom-up dynamic program over the template's partition plan. Table ``S``
holds, for each vertex ``v`` and each ``|S|``-subset ``C`` of colors, the
number of colorful embeddings of subtemplate ``S`` rooted at ``v`` whose
image uses exactly the colors ``C``. Counts are float64 and exact below 2**53.
"""

from __future__ import annotations

import math
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from math import comb

import numpy as np

from .colorsets import MAX_COLORS, split_table
from .template import count_automorphisms, partition_template

CELL_BYTES = np.dtype(np.float64).itemsize
# fixed block length for the per-vertex total reduction; must not depend on thread count
REDUCE_BLOCK = 4096
# cap on gathered split products held per compute block (elements)
WORK_ELEMENTS = 1 << 18

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


class TableMemoryError(MemoryError):
    """A count table could not be allocated."""


def _mix64(z):
    """splitmix64 output finalizer on a uint64 array."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _stream_key(seed, iteration):
    key = np.array([(seed * 0x9E3779B97F4A7C15) & _MASK64], dtype=np.uint64)
    key = _mix64(key) ^ np.uint64(iteration & _MASK64)
    return _mix64(key)[0]


def vertex_hash(seed, iteration, vertices):
    """Counter-based 64-bit hash H(seed, iteration, v) for each vertex id."""
    v = np.asarray(vertices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = _stream_key(seed, iteration) + (v + np.uint64(1)) * _GOLDEN
    return _mix64(z)


@dataclass(frozen=True, eq=False)
class Coloring:
    colors: np.ndarray
    k: int

    def __post_init__(self):
        self.colors.setflags(write=False)

    def __len__(self):
        return len(self.colors)


def color_graph(g, k, seed, iteration):
    """Deterministic coloring: ``colors[v] = H(seed, iteration, v) mod k``."""
    if not 1 <= k <= MAX_COLORS:
        raise ValueError(f"k must be in 1..{MAX_COLORS}, got {k}")
    if seed < 0 or iteration < 0:
        raise ValueError("seed and iteration must be nonnegative")
    n = g.n if hasattr(g, "n") else int(g)
    h = vertex_hash(seed, iteration, np.arange(n, dtype=np.uint64))
    return Coloring((h % np.uint64(k)).astype(np.int8), k)


class TableTracker:
    """Tracks bytes held by live count tables.

    Release is observed through ``weakref.finalize``, so a table counts as
    live until the engine actually drops its last reference.
    """

    def __init__(self):
        self.live = 0
        self.peak = 0
        self.history = []

    def _release(self, nbytes):
        self.live -= nbytes

    def allocate(self, n, width):
        try:
            arr = np.zeros((n, width), dtype=np.float64)
        except (MemoryError, ValueError) as exc:
            raise TableMemoryError(
                f"cannot allocate {n} x {width} count table ({n * width * CELL_BYTES} bytes)"
            ) from exc
        self.live += arr.nbytes
        self.peak = max(self.peak, self.live)
        self.history.append(self.live)
        weakref.finalize(arr, self._release, arr.nbytes)
        return arr


def _row_blocks(n, width):
    rows = max(1, min(n, WORK_ELEMENTS // max(width, 1)))
    return [(lo, min(lo + rows, n)) for lo in range(0, n, rows)] or [(0, 0)]


def leaf_table(colors, k, out):
    out[np.arange(len(colors)), colors] = 1.0
    return out


def combine_rows(out, active, passive_neighbor_sum, k, a, p):
    """Fill ``out`` rows from active rows and neighbour-summed passive rows."""
    ia, ip, starts = split_table(k, a, p)
    products = active[:, ia] * passive_neighbor_sum[:, ip]
    out[:] = np.add.reduceat(products, starts[:-1], axis=1)


def _combine_block(out, active, passive, adj, k, a, p, block):
    lo, hi = block
    nsum = adj[lo:hi] @ passive if (lo, hi) != (0, adj.shape[0]) else adj @ passive
    combine_rows(out[lo:hi], active[lo:hi], nsum, k, a, p)


def fixed_order_total(column):
    """Sum a per-vertex column in fixed-size blocks, blocks added in order."""
    total = 0.0
    for lo in range(0, len(column), REDUCE_BLOCK):
        total += float(np.sum(column[lo:lo + REDUCE_BLOCK]))
    return total


def dp_iteration(g, coloring, plan, threads=1, tracker=None, on_step=None):
    """Number of colorful embeddings of the planned template under ``coloring``.

    ``on_step(index, table)`` is called after each schedule step with the
    freshly computed table. The result does not depend on ``threads``.
    """
    k = plan.t
    if coloring.k != k:
        raise ValueError(f"coloring uses k={coloring.k} colors but template has t={k} vertices")
    if len(coloring) != g.n:
        raise ValueError("coloring length does not match vertex count")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    tracker = tracker if tracker is not None else TableTracker()
    release = plan.last_use()
    tables = {}
    adj = g.csr
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for step, idx in enumerate(plan.schedule):
            sub = plan[idx]
            width = comb(k, sub.size)
            try:
                out = tracker.allocate(g.n, width)
            except TableMemoryError as exc:
                raise TableMemoryError(
                    f"{exc}; estimated peak for this plan is {peak_memory_bytes(g.n, plan)} bytes"
                ) from exc
            if sub.is_leaf:
                leaf_table(coloring.colors, k, out)
            else:
                a = plan[sub.active].size
                p = plan[sub.passive].size
                active, passive = tables[sub.active], tables[sub.passive]
                blocks = _row_blocks(g.n, comb(k, sub.size) * comb(sub.size, a))
                job = partial(_combine_block, out, active, passive, adj, k, a, p)
                if pool is None or len(blocks) == 1:
                    for b in blocks:
                        job(b)
                else:
                    list(pool.map(job, blocks))
                del active, passive, job
            tables[idx] = out
            if on_step is not None:
                on_step(idx, out)
            del out
            for child, last in release.items():
                if last == step and child != plan.top:
                    tables.pop(child, None)
    finally:
        if pool is not None:
            pool.shutdown()
    top = tables.pop(plan.top)
    total = fixed_order_total(top[:, 0])
    del top
    tables.clear()
    return total


def scale_factor(t, automorphisms):
    """Multiplier turning a colorful-embedding count into an occurrence estimate."""
    return t**t / (math.factorial(t) * automorphisms)


def colorful_probability(k):
    return math.factorial(k) / k**k


@dataclass(frozen=True)
class Estimate:
    value: float
    per_iteration: tuple
    stderr: float
    iterations: int
    seed: int
    totals: tuple = field(default=(), repr=False)

    @classmethod
    def from_totals(cls, totals, t, automorphisms, seed):
        factor = scale_factor(t, automorphisms)
        per = np.asarray(totals, dtype=np.float64) * factor
        n_iter = len(per)
        stderr = float(np.std(per, ddof=1) / math.sqrt(n_iter)) if n_iter > 1 else 0.0
        return cls(
            value=float(np.mean(per)),
            per_iteration=tuple(per.tolist()),
            stderr=stderr,
            iterations=n_iter,
            seed=seed,
            totals=tuple(float(x) for x in totals),
        )

    def as_dict(self):
        return {
            "value": self.value,
            "stderr": self.stderr,
            "iterations": self.iterations,
            "seed": self.seed,
            "per_iteration": list(self.per_iteration),
        }


def estimate(g, tpl, iterations=1, threads=1, seed=0):
    """Average of ``iterations`` independent color-coding estimates of the occurrence count."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    plan = partition_template(tpl)
    sigma = count_automorphisms(tpl)
    totals = [
        dp_iteration(g, color_graph(g, tpl.t, seed, i), plan, threads=threads)
        for i in range(iterations)
    ]
    return Estimate.from_totals(totals, tpl.t, sigma, seed)


def memory_profile(n, plan):
    """Live table bytes after each schedule step (children freed once their parent exists)."""
    k = plan.t
    release = plan.last_use()
    live = {}
    profile = []
    for step, idx in enumerate(plan.schedule):
        live[idx] = n * comb(k, plan[idx].size) * CELL_BYTES
        profile.append(sum(live.values()))
        for child, last in release.items():
            if last == step and child != plan.top:
                live.pop(child, None)
    return profile


def peak_memory_bytes(n, plan):
    return max(memory_profile(n, plan))


def estimate_peak_memory(g, plan):
    """Predicted peak bytes of simultaneously live count tables for one iteration."""
    return peak_memory_bytes(g.n, plan)
