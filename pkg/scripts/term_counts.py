#!/usr/bin/env python3
"""Tabulate how many unitary terms the decomposition uses, and its residuals,
across fields and dimensions.

    python scripts/term_counts.py --samples 50
"""

import argparse
from collections import Counter

import numpy as np

from daghilb.linalg import Morphism
from daghilb.unidecomp import decompose, h_linearity_defect


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)

    print(f"{'field':>5} {'dim':>4} {'terms':>16} {'max recon':>10} {'max unit':>10} {'max H-lin':>10}")
    for field in ("C", "R", "H"):
        for n in (2, 4, 6, 8, 12):
            counts: Counter = Counter()
            rec = uni = hlin = 0.0
            for _ in range(args.samples):
                t = Morphism.random(field, n, n, rng)
                dec = decompose(t)
                counts[len(dec.terms)] += 1
                rec = max(rec, dec.residual(t) / max(1.0, t.max_abs()))
                uni = max(uni, dec.worst_unitary_defect())
                if field == "H":
                    hlin = max(hlin, max(h_linearity_defect(u) for _, u in dec.terms))
            hist = ",".join(f"{k}:{v}" for k, v in sorted(counts.items()))
            print(f"{field:>5} {n:>4} {hist:>16} {rec:10.1e} {uni:10.1e} {hlin:10.1e}")


if __name__ == "__main__":
    main()
