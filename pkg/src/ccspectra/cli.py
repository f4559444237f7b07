"""Command-line interface.

Exit codes: 0 success, 1 analysis failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    DEFAULT_THRESHOLD,
    MAX_BRUTE_FORCE_VERTICES,
    brute_force_isomorphic,
    distinguish,
    evaluate_corpus,
    parse_laplacian_target,
)
from .complex import dump, load
from .datasets import CorpusRanges, TorusSpec, fig4_pair, gen_corpus, make_torus, read_manifest, write_corpus
from .errors import CCError
from .operators import cc_laplacian, cells_label, hodge_laplacian, weight_scheme
from .spectral import default_grid, eigendecompose, hks

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _fmt(x) -> str:
    return repr(float(x))


def _emit(rows, out):
    """Write CSV rows to ``out`` (path) or stdout, LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _load(path):
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    try:
        return load(p)
    except (CCError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("CCSPECTRA_THREADS")
    return max(1, int(env)) if env and env.isdigit() else 1


def _weights(cc, args):
    return weight_scheme(cc.max_rank, args.weights)


def cmd_validate(args) -> int:
    p = Path(args.path)
    if not p.is_file():
        print(f"error: {args.path}: no such file", file=sys.stderr)
        return EXIT_INPUT
    try:
        cc = load(p)
    except (CCError, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"ok: {cc.n_vertices} vertices, {cc.n_cells} cells, max rank {cc.max_rank}")
    return EXIT_OK


def cmd_laplacian(args) -> int:
    cc = _load(args.path)
    kind, k = parse_laplacian_target(args.laplacian)
    if kind == "cc":
        mat = cc_laplacian(cc, _weights(cc, args), args.convention).matrix
        labels = [str(v) for v in cc.vertices]
    else:
        mat = hodge_laplacian(cc, k)
        labels = [cells_label(c) for c in cc.cells_of_rank(k)]
    rows = [[""] + labels]
    rows += [[lab] + [_fmt(x) for x in row] for lab, row in zip(labels, mat)]
    _emit(rows, args.out)
    return EXIT_OK


def cmd_hks(args) -> int:
    cc = _load(args.path)
    grid = default_grid(args.d, args.t_max)
    table = hks(eigendecompose(cc_laplacian(cc, _weights(cc, args), args.convention)), grid)
    rows = [["vertex"] + [f"t_{j}" for j in range(1, len(grid) + 1)]]
    rows += [[str(v)] + [_fmt(x) for x in row] for v, row in zip(cc.vertices, table.values)]
    _emit(rows, args.out)
    return EXIT_OK


def _parse_aug(text):
    try:
        rank, faces = text.split(":")
        a, b = faces.split(",")
        return int(rank), (int(a), int(b))
    except ValueError:
        raise InputError(f"bad augmentation {text!r}; expected RANK:FACE_A,FACE_B") from None


def cmd_gen(args) -> int:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "fig4":
        pair = fig4_pair()
        dump(pair.left, out / "A.cc")
        dump(pair.right, out / "B.cc")
        print(f"wrote {out / 'A.cc'} and {out / 'B.cc'}", file=sys.stderr)
    elif args.kind == "torus":
        augs = tuple(_parse_aug(a) for a in args.aug or ())
        max_rank = max([args.max_rank] + [r for r, _ in augs])
        cc = make_torus(TorusSpec(args.m, args.n, max_rank, augs))
        path = out / f"torus_{args.m}x{args.n}.cc"
        dump(cc, path)
        print(f"wrote {path} ({cc.n_cells} cells)", file=sys.stderr)
    else:
        ranges = CorpusRanges((args.min_size, args.max_size), (args.min_size, args.max_size))
        corpus = gen_corpus(args.count, ranges, args.seed)
        manifest = write_corpus(corpus, out)
        print(f"wrote {2 * len(corpus)} files and {manifest}", file=sys.stderr)
    return EXIT_OK


def _known_isomorphic(a, b):
    """Ground truth for a lone pair: brute force when small, structural equality otherwise, else unknown."""
    if a == b:
        return True
    if a.n_vertices != b.n_vertices:
        return False
    if a.n_vertices <= MAX_BRUTE_FORCE_VERTICES:
        return brute_force_isomorphic(a, b)
    return None


def cmd_distinguish(args) -> int:
    grid = default_grid(args.d, args.t_max)
    header = ["pair_id", "spectral_distance", "descriptor_distance", "verdict"]
    if args.manifest:
        if not Path(args.manifest).is_file():
            raise InputError(f"{args.manifest}: no such file")
        try:
            pairs = read_manifest(args.manifest)
        except (CCError, ValueError, KeyError) as exc:
            raise InputError(f"{args.manifest}: {exc}") from None
        report = evaluate_corpus(
            pairs, grid, args.convention, args.threshold, args.laplacian, baseline="hodge:0",
            oracle=args.oracle, threads=_threads(args),
        )
        rows = [header + (["oracle_isomorphic"] if args.oracle else [])]
        for r in report.rows:
            row = [r.pair_id, _fmt(r.report.spectral_distance), _fmt(r.report.descriptor_distance), r.report.verdict]
            if args.oracle:
                row.append("" if r.oracle_isomorphic is None else str(r.oracle_isomorphic).lower())
            rows.append(row)
        _emit(rows, args.out)
        print(
            f"accuracy={report.accuracy():.4f} baseline_hodge0={report.baseline_accuracy():.4f} "
            f"pairs={len(report.rows)}",
            file=sys.stderr,
        )
        return EXIT_OK if report.all_distinguished else EXIT_FAIL

    if not (args.path_a and args.path_b):
        raise InputError("give two CC files or --manifest")
    a, b = _load(args.path_a), _load(args.path_b)
    rep = distinguish(a, b, grid, args.convention, args.threshold, args.laplacian)
    truth = _known_isomorphic(a, b)
    rows = [header + ["oracle_isomorphic"]]
    rows.append([0, _fmt(rep.spectral_distance), _fmt(rep.descriptor_distance), rep.verdict,
                 "" if truth is None else str(truth).lower()])
    _emit(rows, args.out)
    if truth is None:
        return EXIT_OK
    # a verdict contradicting the known ground truth is an analysis failure
    return EXIT_OK if rep.distinguished != truth else EXIT_FAIL


def cmd_bench(args) -> int:
    from .bench import BenchRecord, bench_kernels, bench_pipeline

    if args.reps < 1:
        raise InputError("--reps must be >= 1")
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"bad --sizes {args.sizes!r}") from None
    if not sizes or min(sizes) < 1:
        raise InputError("--sizes must be positive integers")
    if args.kernels:
        rows = bench_kernels(sizes, args.reps)
        keys = list(rows[0]) if rows else []
        _emit([keys] + [[_fmt(r[k]) if isinstance(r[k], float) else r[k] for k in keys] for r in rows], args.out)
        return EXIT_OK
    records = bench_pipeline(sizes, args.reps, args.convention, default_grid(args.d, args.t_max))
    rows = [BenchRecord.header()]
    rows += [[_fmt(x) if isinstance(x, float) else x for x in rec.row()] for rec in records]
    _emit(rows, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, default=10, help="number of diffusion times (default 10)")
    common.add_argument("--t-max", type=float, default=3.0, help="largest diffusion time (default 3.0)")
    common.add_argument("--convention", choices=["signed", "dirichlet"], default="dirichlet")
    common.add_argument("--weights", choices=["dyadic"], default="dyadic")
    common.add_argument("--laplacian", default="cc", help="'cc' or 'hodge:K'")
    common.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker threads (env CCSPECTRA_THREADS)")
    common.add_argument("--out", default=None, help="output file or directory (default stdout / cwd)")

    parser = argparse.ArgumentParser(prog="ccspectra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a CC file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("laplacian", parents=[common], help="write a Laplacian as CSV")
    p.add_argument("path")
    p.set_defaults(func=cmd_laplacian)

    p = sub.add_parser("hks", parents=[common], help="write the HKS table as CSV")
    p.add_argument("path")
    p.set_defaults(func=cmd_hks)

    p = sub.add_parser("gen", parents=[common], help="generate tori, the three-vertex counterexample pair or a blind-spot corpus")
    p.add_argument("kind", choices=["torus", "blindspot-corpus", "fig4"])
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--max-rank", type=int, default=2, choices=[2, 3, 4])
    p.add_argument("--aug", action="append", help="augmentation RANK:FACE_A,FACE_B (repeatable)")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--min-size", type=int, default=3)
    p.add_argument("--max-size", type=int, default=6)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("distinguish", parents=[common], help="compare two CC files or a corpus manifest")
    p.add_argument("path_a", nargs="?")
    p.add_argument("path_b", nargs="?")
    p.add_argument("--manifest", default=None)
    p.add_argument("--oracle", action="store_true", help="add brute-force isomorphism column (<= 10 vertices)")
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("bench", parents=[common], help="time Laplacian build, eigendecomposition and HKS")
    p.add_argument("--sizes", default="9,100,400,900")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--kernels", action="store_true", help="compare compiled and fallback kernels instead")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CCError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
