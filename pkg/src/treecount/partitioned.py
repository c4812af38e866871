"""In-process simulation of vertex-sharded, message-passing color coding.

Each worker owns a contiguous vertex range and computes only those rows of
every count table. Before a composite step can read the passive child at a
neighbour ``u`` owned elsewhere, the owner of ``u`` pushes that row. Rows a
worker never received stay NaN, so any read of an unreceived row surfaces
as a hard fault instead of a silently wrong count.
"""

from __future__ import annotations

import queue
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .colorcount import (
    CELL_BYTES,
    Estimate,
    combine_rows,
    fixed_order_total,
    vertex_hash,
)
from .template import count_automorphisms, partition_template

RECV_TIMEOUT = 60.0
_POLL = 0.05


class HaloContractError(RuntimeError):
    """A worker read, expected, or received a halo row outside the exchange contract."""


@dataclass(frozen=True)
class ShardPlan:
    workers: int
    ranges: tuple
    halos: tuple

    def owner(self, v):
        starts = [lo for lo, _ in self.ranges]
        return int(np.searchsorted(starts, v, side="right")) - 1

    def halo_sources(self, w):
        """Map owner -> sorted vertex array that worker ``w`` needs from that owner."""
        halo = self.halos[w]
        out = {}
        for src, (lo, hi) in enumerate(self.ranges):
            if src == w:
                continue
            part = halo[(halo >= lo) & (halo < hi)]
            if len(part):
                out[src] = part
        return out

    def predicted_rows(self):
        """Halo rows exchanged per composite step."""
        return sum(len(h) for h in self.halos)

    def predicted_messages(self):
        return sum(len(self.halo_sources(w)) for w in range(self.workers))


def partition_vertices(g, workers):
    """Near-equal contiguous ranges plus, for each worker, the remote neighbours it reads."""
    if not 1 <= workers <= max(g.n, 1):
        raise ValueError(f"worker count must be in 1..{g.n}, got {workers}")
    base, extra = divmod(g.n, workers)
    ranges, lo = [], 0
    for w in range(workers):
        hi = lo + base + (1 if w < extra else 0)
        ranges.append((lo, hi))
        lo = hi
    halos = []
    for lo, hi in ranges:
        nbrs = np.unique(g.adjacency[g.offsets[lo]:g.offsets[hi]].astype(np.int64))
        halo = nbrs[(nbrs < lo) | (nbrs >= hi)]
        halo.setflags(write=False)
        halos.append(halo)
    return ShardPlan(workers, tuple(ranges), tuple(halos))


@dataclass(frozen=True)
class Message:
    kind: str  # "halo" or "gather"
    step: int
    src: int
    vertices: np.ndarray
    rows: np.ndarray

    @property
    def nbytes(self):
        return self.rows.nbytes


@dataclass
class ExchangeStats:
    """Traffic counters keyed by schedule step (halo) plus the final gather."""

    halo_messages: dict = field(default_factory=lambda: defaultdict(int))
    halo_rows: dict = field(default_factory=lambda: defaultdict(int))
    halo_bytes: dict = field(default_factory=lambda: defaultdict(int))
    gather_messages: int = 0
    gather_bytes: int = 0

    def record(self, msg):
        if msg.kind == "halo":
            self.halo_messages[msg.step] += 1
            self.halo_rows[msg.step] += len(msg.vertices)
            self.halo_bytes[msg.step] += msg.nbytes
        else:
            self.gather_messages += 1
            self.gather_bytes += msg.nbytes

    def merge(self, other):
        for mine, theirs in (
            (self.halo_messages, other.halo_messages),
            (self.halo_rows, other.halo_rows),
            (self.halo_bytes, other.halo_bytes),
        ):
            for key, val in theirs.items():
                mine[key] += val
        self.gather_messages += other.gather_messages
        self.gather_bytes += other.gather_bytes

    def as_dict(self):
        return {
            "halo_steps": [
                {
                    "step": s,
                    "messages": self.halo_messages[s],
                    "rows": self.halo_rows[s],
                    "bytes": self.halo_bytes[s],
                }
                for s in sorted(self.halo_rows)
            ],
            "gather_messages": self.gather_messages,
            "gather_bytes": self.gather_bytes,
        }


class Channel:
    """Reliable, ordered, typed point-to-point delivery between worker ids."""

    def __init__(self, workers):
        self.inboxes = [queue.Queue() for _ in range(workers)]
        self.stats = ExchangeStats()
        self.abort = threading.Event()
        self._lock = threading.Lock()

    def send(self, dst, msg):
        with self._lock:
            self.stats.record(msg)
        self.inboxes[dst].put(msg)

    def recv(self, me, pending, kind, step, src):
        """Next message of (kind, step, src) for worker ``me``; others are parked in ``pending``."""
        key = (kind, step, src)
        waited = 0.0
        while key not in pending:
            if self.abort.is_set():
                raise HaloContractError(f"worker {me}: aborted while waiting for {key}")
            try:
                msg = self.inboxes[me].get(timeout=_POLL)
            except queue.Empty:
                waited += _POLL
                if waited >= RECV_TIMEOUT:
                    raise HaloContractError(f"worker {me}: no {kind} message from {src} for step {step}")
                continue
            pending[(msg.kind, msg.step, msg.src)] = msg
        return pending.pop(key)


class _Worker:
    def __init__(self, wid, g, shard, plan, channel, poison=True):
        self.wid = wid
        self.lo, self.hi = shard.ranges[wid]
        self.owned = self.hi - self.lo
        self.halo = shard.halos[wid]
        self.local_n = self.owned + len(self.halo)
        self.plan = plan
        self.channel = channel
        self.shard = shard
        self.poison = poison
        self.sources = shard.halo_sources(wid)
        self.destinations = {
            dst: verts
            for dst in range(shard.workers)
            if dst != wid
            for src, verts in shard.halo_sources(dst).items()
            if src == wid
        }
        block = g.csr[self.lo:self.hi]
        cols = block.indices.astype(np.int64)
        local = np.where(
            (cols >= self.lo) & (cols < self.hi),
            cols - self.lo,
            self.owned + np.searchsorted(self.halo, cols),
        )
        self.adj = sp.csr_matrix(
            (block.data, local, block.indptr), shape=(self.owned, self.local_n)
        )

    def _new_table(self, width):
        fill = np.nan if self.poison else 0.0
        table = np.full((self.local_n, width), fill, dtype=np.float64)
        table[: self.owned] = 0.0
        return table

    def _exchange(self, step, table, pending):
        for dst, verts in self.destinations.items():
            rows = np.ascontiguousarray(table[verts - self.lo])
            self.channel.send(dst, Message("halo", step, self.wid, verts, rows))
        for src, verts in self.sources.items():
            msg = self.channel.recv(self.wid, pending, "halo", step, src)
            if not np.array_equal(msg.vertices, verts):
                raise HaloContractError(
                    f"worker {self.wid}: step {step} rows from {src} do not match the halo plan"
                )
            pos = self.owned + np.searchsorted(self.halo, msg.vertices)
            table[pos] = msg.rows

    def run(self, seed, iteration):
        plan = self.plan
        k = plan.t
        release = plan.last_use()
        passive = plan.passive_children()
        tables = {}
        pending = {}
        colors = None
        for step, idx in enumerate(plan.schedule):
            sub = plan[idx]
            out = self._new_table(comb(k, sub.size))
            if sub.is_leaf:
                if colors is None:
                    owned_ids = np.arange(self.lo, self.hi, dtype=np.uint64)
                    colors = (vertex_hash(seed, iteration, owned_ids) % np.uint64(k)).astype(np.int64)
                out[np.arange(self.owned), colors] = 1.0
            else:
                a = plan[sub.active].size
                p = plan[sub.passive].size
                nsum = self.adj @ tables[sub.passive]
                combine_rows(out[: self.owned], tables[sub.active][: self.owned], nsum, k, a, p)
                if np.isnan(out[: self.owned]).any():
                    raise HaloContractError(
                        f"worker {self.wid}: step {step} read a halo row it never received"
                    )
            if idx in passive:
                self._exchange(step, out, pending)
            tables[idx] = out
            for child, last in release.items():
                if last == step and child != plan.top:
                    tables.pop(child, None)
        top = tables.pop(plan.top)[: self.owned, 0].copy()
        self.channel.send(
            0, Message("gather", len(plan.schedule), self.wid, np.arange(self.lo, self.hi), top)
        )
        if self.wid != 0:
            return None
        column = np.empty(self.shard.ranges[-1][1], dtype=np.float64)
        for src, (lo, hi) in enumerate(self.shard.ranges):
            msg = self.channel.recv(0, pending, "gather", len(plan.schedule), src)
            column[lo:hi] = msg.rows
        return fixed_order_total(column)


def distributed_iteration(g, shard, plan, seed, iteration, poison=True):
    """One color-coding iteration across ``shard.workers`` concurrent workers.

    Returns ``(total, stats)``; ``total`` equals the single-process
    ``dp_iteration`` result bitwise.
    """
    channel = Channel(shard.workers)
    workers = [_Worker(w, g, shard, plan, channel, poison) for w in range(shard.workers)]
    results = [None] * shard.workers
    errors = []

    def target(w):
        try:
            results[w] = workers[w].run(seed, iteration)
        except BaseException as exc:  # noqa: BLE001 - re-raised in caller
            errors.append(exc)
            channel.abort.set()

    if shard.workers == 1:
        target(0)
    else:
        threads = [threading.Thread(target=target, args=(w,)) for w in range(shard.workers)]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
    if errors:
        primary = [e for e in errors if "aborted" not in str(e)]
        raise (primary or errors)[0]
    return results[0], channel.stats


def distributed_count(g, tpl, workers, iterations=1, seed=0):
    """Sharded estimate plus accumulated exchange counters."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    shard = partition_vertices(g, workers)
    plan = partition_template(tpl)
    stats = ExchangeStats()
    totals = []
    for i in range(iterations):
        total, it_stats = distributed_iteration(g, shard, plan, seed, i)
        totals.append(total)
        stats.merge(it_stats)
    est = Estimate.from_totals(totals, tpl.t, count_automorphisms(tpl), seed)
    return est, stats


def distributed_estimate(g, tpl, workers, iterations=1, seed=0):
    return distributed_count(g, tpl, workers, iterations, seed)[0]


def halo_bytes_per_step(shard, plan):
    """Predicted halo payload for each passive-child step."""
    k = plan.t
    rows = shard.predicted_rows()
    out = {}
    for step, idx in enumerate(plan.schedule):
        if idx in plan.passive_children():
            out[step] = rows * comb(k, plan[idx].size) * CELL_BYTES
    return out
