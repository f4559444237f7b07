"""Compare the compiled and pure-Python kernels on augmented tori.

    python benchmarks/bench_kernels.py --sizes 100,400,900 --reps 5 --out kernels.csv
"""
import argparse
import csv
import sys
from collections import defaultdict

from ccspectra import kernels
from ccspectra.bench import bench_kernels


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="100,400,900")
    parser.add_argument("--iso-sizes", default="6,10", help="cycle lengths for the isomorphism search")
    parser.add_argument("--reps", type=int, default=5)
    parser.add_argument("--out", default=None)
    args = parser.parse_args(argv)

    sizes = [int(s) for s in args.sizes.split(",")]
    iso = [int(s) for s in args.iso_sizes.split(",")]
    rows = bench_kernels(sizes, args.reps, iso)

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        fh.close()

    times = defaultdict(dict)
    for r in rows:
        times[(r["kernel"], r["n_vertices"])][r["backend"]] = r["median_ms"]
    print(f"active backend: {kernels.BACKEND}", file=sys.stderr)
    for (kernel, n), t in times.items():
        if "cython" in t and "python" in t:
            print(f"{kernel:>20} n={n:<5} python/cython speedup {t['python'] / t['cython']:8.1f}x", file=sys.stderr)


if __name__ == "__main__":
    main()
