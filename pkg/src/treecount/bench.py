"""Scaling experiments: wall time, speedup and multi-threading efficiency.

Efficiency is speedup over the baseline row divided by the relative growth
in parallelism, so a baseline of one thread gives ``T_1 / (p * T_p)``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import statistics
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .colorcount import color_graph, dp_iteration, estimate_peak_memory
from .partitioned import distributed_iteration, partition_vertices
from .template import partition_template

CSV_COLUMNS = ("threads", "wall_seconds", "speedup", "efficiency", "peak_mem_bytes", "checksum")


@dataclass
class ScalingRow:
    threads: int
    wall_seconds: float
    speedup: float
    efficiency: float
    peak_mem_bytes: int = 0
    checksum: str = ""
    # externally measured metrics (bandwidth, NUMA share, ...); never collected here
    external: dict = field(default_factory=dict)


@dataclass
class ScalingReport:
    rows: list = field(default_factory=list)
    mode: str = "threads"

    @classmethod
    def from_timings(cls, timings, peak_mem_bytes=0, checksum="", mode="threads"):
        """Build rows from ``(threads, wall_seconds)`` pairs; the first pair is the baseline."""
        rows = []
        if timings:
            base_p, base_t = timings[0]
            for p, wall in timings:
                if p < 1 or wall <= 0:
                    raise ValueError(f"bad timing ({p}, {wall})")
                # exact rationals, one final rounding per stored ratio
                speedup = Fraction(base_t) / Fraction(wall)
                rows.append(
                    ScalingRow(
                        threads=int(p),
                        wall_seconds=float(wall),
                        speedup=float(speedup),
                        efficiency=float(speedup * base_p / p),
                        peak_mem_bytes=int(peak_mem_bytes),
                        checksum=checksum,
                    )
                )
        return cls(rows, mode)

    def __len__(self):
        return len(self.rows)


def efficiency_series(report):
    return [(row.threads, row.efficiency) for row in report.rows]


def time_call(fn, repeat=1):
    """Median wall time of ``repeat`` calls and the last return value."""
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), result


def checksum_totals(totals):
    data = np.asarray(totals, dtype="<f8").tobytes()
    return hashlib.sha256(data).hexdigest()[:16]


def run_scaling(g, tpl, thread_list, repeat=3, seed=0, iterations=1, mode="threads"):
    """Time one sweep of ``iterations`` DP iterations at each parallelism level.

    ``mode="workers"`` times the sharded simulation instead of threads.
    Trials run one after another, never concurrently.
    """
    thread_list = list(thread_list)
    if not thread_list:
        raise ValueError("thread list must not be empty")
    if any(b <= a for a, b in zip(thread_list, thread_list[1:])) or thread_list[0] < 1:
        raise ValueError("thread list must be positive and strictly ascending")
    if mode not in ("threads", "workers"):
        raise ValueError(f"unknown mode {mode!r}")
    plan = partition_template(tpl)
    colorings = [color_graph(g, tpl.t, seed, i) for i in range(iterations)]
    peak = estimate_peak_memory(g, plan)

    timings, sums = [], []
    for p in thread_list:
        if mode == "threads":
            def sweep(p=p):
                return [dp_iteration(g, c, plan, threads=p) for c in colorings]
        else:
            shard = partition_vertices(g, p)

            def sweep(shard=shard):
                return [distributed_iteration(g, shard, plan, seed, i)[0] for i in range(iterations)]
        wall, totals = time_call(sweep, repeat)
        timings.append((p, max(wall, 1e-9)))
        sums.append(checksum_totals(totals))

    report = ScalingReport.from_timings(timings, peak, mode=mode)
    for row, cs in zip(report.rows, sums):
        row.checksum = cs
    return report


def report_to_json(report):
    return json.dumps({"mode": report.mode, "rows": [asdict(r) for r in report.rows]}, indent=2)


def report_to_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.rows:
        writer.writerow([r.threads, repr(r.wall_seconds), repr(r.speedup), repr(r.efficiency),
                         r.peak_mem_bytes, r.checksum])
    return buf.getvalue()


def emit_report(report, fmt="csv", path="-"):
    """Write ``report`` as csv or json to ``path`` (``-`` for stdout)."""
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def load_report(path, fmt=None):
    fmt = fmt or ("json" if str(path).endswith(".json") else "csv")
    with open(path, encoding="utf-8", newline="") as fh:
        if fmt == "json":
            data = json.load(fh)
            return ScalingReport([ScalingRow(**r) for r in data["rows"]], data.get("mode", "threads"))
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        rows = [
            ScalingRow(
                threads=int(r["threads"]),
                wall_seconds=float(r["wall_seconds"]),
                speedup=float(r["speedup"]),
                efficiency=float(r["efficiency"]),
                peak_mem_bytes=int(r["peak_mem_bytes"]),
                checksum=r["checksum"],
            )
            for r in reader
        ]
        return ScalingReport(rows)
