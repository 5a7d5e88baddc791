"""dyncon-bench: run benchmark scenarios and write metrics to CSV."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from ..connectivity import VARIANTS
from ..levels import DEFAULT_SAMPLES
from .graphs import GraphFormatError, load_graph
from .scenarios import COLUMNS, SCENARIOS, ScenarioConfig, run_scenario, write_csv


def _sampling(text: str) -> int:
    if text == "on":
        return DEFAULT_SAMPLES
    if text == "off":
        return 0
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected on, off or a non-negative budget") from None
    if k < 0:
        raise argparse.ArgumentTypeError("sampling budget must be non-negative")
    return k


def _int_list(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x]


def _variant_list(text: str) -> List[str]:
    out = [x for x in text.split(",") if x]
    for v in out:
        if v not in VARIANTS:
            raise argparse.ArgumentTypeError(f"unknown variant {v!r}; choose from {VARIANTS}")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dyncon-bench", description=__doc__)
    p.add_argument("--graph", required=True,
                   help="edge-list or DIMACS file, or gen:erdos:n=..:m=..:seed=.. / gen:grid:rows=..:keep=..")
    p.add_argument("--format", choices=("edges", "dimacs"), default=None,
                   help="file format (sniffed when omitted)")
    p.add_argument("--scenario", choices=SCENARIOS, default="random")
    p.add_argument("--read-ratio", type=float, default=0.99)
    p.add_argument("--threads", type=_int_list, default=[1],
                   help="thread count, or a comma-separated list to sweep")
    work = p.add_mutually_exclusive_group()
    work.add_argument("--ops", type=int, default=None)
    work.add_argument("--seconds", type=float, default=None)
    p.add_argument("--variant", type=_variant_list, default=["full"],
                   help=f"one of {', '.join(VARIANTS)}, or a comma-separated list")
    p.add_argument("--sampling", type=_sampling, default=DEFAULT_SAMPLES,
                   help="on, off, or a per-level sample budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel", choices=("python", "cython"), default=None)
    p.add_argument("--warmup", type=int, default=0, help="discarded runs before timing")
    p.add_argument("--repeats", type=int, default=1, help="timed runs; timing columns are medians")
    p.add_argument("--csv", default=None, help="write results here")
    p.add_argument("--append", action="store_true", help="append to an existing CSV")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        g = load_graph(args.graph, args.format)
    except (GraphFormatError, OSError) as exc:
        print(f"dyncon-bench: {exc}", file=sys.stderr)
        return 2
    ops = args.ops
    if args.scenario == "random" and ops is None and args.seconds is None:
        ops = 100_000
    results = []
    for variant in args.variant:
        for threads in args.threads:
            cfg = ScenarioConfig(scenario=args.scenario, read_ratio=args.read_ratio,
                                 threads=threads, ops=ops, seconds=args.seconds,
                                 variant=variant, samples=args.sampling, seed=args.seed,
                                 kernel=args.kernel, warmup=args.warmup, repeats=args.repeats)
            try:
                r = run_scenario(cfg, g)
            except ValueError as exc:
                print(f"dyncon-bench: {exc}", file=sys.stderr)
                return 2
            results.append(r)
            print(f"{variant:>8} threads={threads:<3} ops={r.ops:<8} {r.throughput:12.0f} ops/s  "
                  f"active={r.active_time_rate:.3f}  ns_add={100 * r.pct_non_spanning_additions:.1f}%  "
                  f"ns_rem={100 * r.pct_non_spanning_removals:.1f}%  "
                  f"largest={100 * r.largest_component_fraction:.1f}%  "
                  f"first_try={100 * r.read_first_try_rate:.4f}%")
    if args.csv:
        write_csv(results, args.csv, append=args.append)
    return 0


if __name__ == "__main__":
    sys.exit(main())
