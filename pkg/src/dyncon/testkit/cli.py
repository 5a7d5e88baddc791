"""dyncon-testkit: sequential equivalence, phase stress and scripted schedules."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .._kernel import get_kernel
from ..connectivity import VARIANTS
from .scripted import SCHEDULES, run_scripted
from .sequential import run_sequential_equivalence
from .stress import run_phase_stress, run_small_histories


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dyncon-testkit", description=__doc__)
    p.add_argument("mode", choices=("sequential", "stress", "histories", "scripted"))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=2)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--ops", type=int, default=10_000,
                   help="total ops (sequential) or ops per phase (stress)")
    p.add_argument("--phases", type=int, default=50)
    p.add_argument("--schedule", choices=SCHEDULES + ("all",), default="all")
    p.add_argument("--variant", choices=VARIANTS, default="full")
    p.add_argument("--kernel", choices=("python", "cython"), default=None)
    p.add_argument("--read-ratio", type=float, default=0.34)
    p.add_argument("--invariants-every", type=int, default=0,
                   help="sequential mode: sweep invariants every k ops (0 = never)")
    p.add_argument("--mutation", action="append", default=[],
                   help="inject a known bug, e.g. skip_version_bump")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    kernel = get_kernel(args.kernel)
    if args.mode == "sequential":
        rep = run_sequential_equivalence(args.seed, args.n, args.ops, variant=args.variant,
                                         kernel=kernel, mutations=tuple(args.mutation),
                                         invariants_every=args.invariants_every)
        print(rep.summary())
        if not rep.passed:
            for op in rep.reproducer:
                print("  ", *op)
        return 0 if rep.passed else 1
    if args.mode == "stress":
        rep = run_phase_stress(args.threads, args.n, args.phases, args.ops,
                               read_ratio=args.read_ratio, variant=args.variant,
                               kernel=kernel, seed=args.seed)
        print(f"seed={args.seed} " + rep.summary())
        return 0 if rep.passed else 1
    if args.mode == "histories":
        rep = run_small_histories(args.phases, variant=args.variant, kernel=kernel, seed=args.seed)
        print(f"seed={args.seed}: {rep.checked} histories, {len(rep.violations)} violations")
        for v in rep.violations[:3]:
            print("  ", v)
        return 0 if rep.passed else 1
    names = SCHEDULES if args.schedule == "all" else (args.schedule,)
    ok = True
    for name in names:
        verdict = run_scripted(name, kernel=kernel, seed=args.seed)
        print(verdict.summary())
        ok &= verdict.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
