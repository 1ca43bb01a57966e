"""Stand-in solver: print the stored solution for a desk benchmark.

    python scripts/replay_solution.py benchmarks/desk/max2.sl [--mutation swap]
"""

import argparse
import sys
from pathlib import Path


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("benchmark")
    ap.add_argument("--mutation", default=None)
    args = ap.parse_args()
    bench = Path(args.benchmark)
    suffix = f".{args.mutation}" if args.mutation else ""
    sol = bench.parent / "solutions" / f"{bench.stem}{suffix}.sol"
    if not sol.exists():
        print(f"no stored solution for {bench.name}", file=sys.stderr)
        return 1
    sys.stdout.write(sol.read_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
