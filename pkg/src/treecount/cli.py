"""Command-line entry point: ``treecount <subcommand> ...``."""

import argparse
import json
import os
import sys

from . import bench
from .colorcount import estimate, memory_profile
from .graph import GraphFormatError, degree_stats, load_edge_list, rmat_generate, save_edge_list
from .oracle import brute_force_embeddings
from .partitioned import distributed_count
from .template import TemplateError, count_automorphisms, parse_template, partition_template


class ConfigError(ValueError):
    """Arguments are well-formed but fail validation (exit code 2)."""


def _positive(name, value, minimum=1):
    if value is not None and value < minimum:
        raise ConfigError(f"--{name} must be >= {minimum}, got {value}")


def _existing(name, path):
    if path is not None and not os.path.isfile(path):
        raise ConfigError(f"--{name}: no such file: {path}")


def _thread_list(text):
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("thread list is empty")
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="treecount", description="Color-coding tree template counting and scaling harness."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_choices=("text", "json"), default_fmt="text"):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=fmt_choices, default=default_fmt)

    p = sub.add_parser("count", help="estimate occurrences of a template")
    p.add_argument("--graph", required=True)
    p.add_argument("--template", required=True)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    common(p)

    p = sub.add_parser("exact", help="exact embedding count by backtracking (small inputs)")
    p.add_argument("--graph", required=True)
    p.add_argument("--template", required=True)
    common(p)

    p = sub.add_parser("rmat", help="generate an RMAT edge list")
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--a", type=float, default=0.57)
    p.add_argument("--b", type=float, default=0.19)
    p.add_argument("--c", type=float, default=0.19)
    p.add_argument("--d", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="thread or worker scaling report")
    p.add_argument("--graph", required=True)
    p.add_argument("--template", required=True)
    p.add_argument("--threads", type=_thread_list, default=[1, 2, 4])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--iterations", type=int, default=1)
    p.add_argument("--mode", choices=("threads", "workers"), default="threads")
    common(p, ("csv", "json"), "csv")

    p = sub.add_parser("mem", help="predicted peak count-table memory")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph")
    src.add_argument("--vertices", type=int)
    p.add_argument("--template", required=True)
    common(p)

    p = sub.add_parser("partition-info", help="dump the template partition plan")
    p.add_argument("--template", required=True)
    common(p)
    return parser


def _validate(args):
    for name in ("graph", "template"):
        _existing(name, getattr(args, name, None))
    for name in ("iterations", "threads", "workers", "repeat", "vertices", "scale"):
        value = getattr(args, name, None)
        if isinstance(value, int):
            _positive(name, value)
    if isinstance(getattr(args, "threads", None), list):
        for t in args.threads:
            _positive("threads", t)
    if getattr(args, "edges", None) is not None:
        _positive("edges", args.edges, 0)
    if args.seed < 0:
        raise ConfigError("--seed must be nonnegative")


def _write(args, payload, text):
    if args.format == "json":
        out = json.dumps(payload, indent=2) + "\n"
    else:
        out = text + "\n"
    if args.out == "-":
        sys.stdout.write(out)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)


def cmd_count(args):
    g, _ = load_edge_list(args.graph)
    tpl = parse_template(args.template)
    stats = None
    if args.workers is None:
        est = estimate(g, tpl, args.iterations, threads=args.threads, seed=args.seed)
    else:
        if args.workers > g.n:
            raise ConfigError(f"--workers must be <= vertex count {g.n}")
        est, stats = distributed_count(g, tpl, args.workers, args.iterations, args.seed)
    payload = {
        "estimate": est.value,
        "stderr": est.stderr,
        "iterations": est.iterations,
        "seed": est.seed,
        "template_vertices": tpl.t,
        "automorphisms": count_automorphisms(tpl),
    }
    text = f"estimate={est.value!r} stderr={est.stderr!r} iterations={est.iterations} seed={est.seed}"
    if stats is not None and args.workers > 1:
        payload["workers"] = args.workers
        payload["exchange"] = stats.as_dict()
        lines = [text, f"workers={args.workers}"]
        for s in payload["exchange"]["halo_steps"]:
            lines.append(f"step {s['step']}: messages={s['messages']} rows={s['rows']} bytes={s['bytes']}")
        text = "\n".join(lines)
    _write(args, payload, text)


def cmd_exact(args):
    g, _ = load_edge_list(args.graph)
    tpl = parse_template(args.template)
    emb = brute_force_embeddings(g, tpl)
    sigma = count_automorphisms(tpl)
    payload = {"embeddings": emb, "automorphisms": sigma, "occurrences": emb // sigma}
    _write(args, payload, f"embeddings={emb} occurrences={emb // sigma}")


def cmd_rmat(args):
    g = rmat_generate(args.scale, args.edges, args.a, args.b, args.c, args.d, seed=args.seed)
    save_edge_list(g, args.out)
    s = degree_stats(g)
    print(f"wrote {args.out}: n={g.n} m={g.m} max_degree={s.max} mean_degree={s.mean:.3f}", file=sys.stderr)


def cmd_bench(args):
    g, _ = load_edge_list(args.graph)
    tpl = parse_template(args.template)
    if args.mode == "workers" and max(args.threads) > g.n:
        raise ConfigError("worker count exceeds vertex count")
    try:
        report = bench.run_scaling(
            g, tpl, args.threads, args.repeat, args.seed, args.iterations, args.mode
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    bench.emit_report(report, args.format, args.out)


def cmd_mem(args):
    tpl = parse_template(args.template)
    n = load_edge_list(args.graph)[0].n if args.graph else args.vertices
    plan = partition_template(tpl)
    profile = memory_profile(n, plan)
    peak = max(profile)
    payload = {"vertices": n, "template_vertices": tpl.t, "peak_bytes": peak, "profile": profile}
    _write(args, payload, f"peak_bytes={peak} ({peak / 2**30:.3f} GiB) vertices={n} t={tpl.t}")


def cmd_partition_info(args):
    tpl = parse_template(args.template)
    plan = partition_template(tpl)
    payload = {
        "t": tpl.t,
        "automorphisms": count_automorphisms(tpl),
        "top": plan.top,
        "schedule": list(plan.schedule),
        "subtemplates": [
            {
                "vertices": sorted(s.vertices),
                "root": s.root,
                "active": s.active,
                "passive": s.passive,
                "cut_neighbor": s.cut_neighbor,
            }
            for s in plan.subtemplates
        ],
    }
    _write(args, payload, plan.describe())


COMMANDS = {
    "count": cmd_count,
    "exact": cmd_exact,
    "rmat": cmd_rmat,
    "bench": cmd_bench,
    "mem": cmd_mem,
    "partition-info": cmd_partition_info,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"treecount {args.command}: {exc}", file=sys.stderr)
        return 2
    except (GraphFormatError, TemplateError, ValueError, MemoryError, RuntimeError, OSError) as exc:
        print(f"treecount {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
