#!/usr/bin/env python3
"""Write a small subspace file (a chain plus a complement pair) and print its
operation table through the command line entry point."""

import json
import sys
import tempfile

from daghilb.cli import main as cli_main


def _sub(vectors, n):
    return {"field": "R", "ambient": n, "basis": [[[x] for x in v] for v in vectors]}


def main() -> int:
    subs = [
        _sub([[1, 0, 0]], 3),
        _sub([[1, 0, 0], [0, 1, 0]], 3),
        _sub([[0, 1, 0], [0, 0, 1]], 3),
        _sub([[1, 1, 0]], 3),
    ]
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump({"subspaces": subs}, fh)
    return cli_main(["lattice", fh.name, "--out", fh.name + ".out.json"])


if __name__ == "__main__":
    sys.exit(main())
