#!/usr/bin/env python3
"""Run the full audit at a chosen scale and write the JSON report.

    python scripts/run_audit.py --trials 200 --out audit.json
"""

import argparse
import sys
import time

from daghilb.audit import AuditConfig, dumps, run_audit, summary_lines


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--dims", default="0,1,2,3,4,6,8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="audit.json")
    args = p.parse_args()

    cfg = AuditConfig(dims=tuple(int(d) for d in args.dims.split(",")), trials=args.trials, seed=args.seed)
    start = time.perf_counter()
    report = run_audit(cfg)
    elapsed = time.perf_counter() - start
    with open(args.out, "w") as fh:
        fh.write(dumps(report))
    for line in summary_lines(report):
        print(line)
    s = report["summary"]
    print(f"{s['checks'] - s['failed_checks']}/{s['checks']} checks passed in {elapsed:.1f} s -> {args.out}")
    return 0 if s["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
