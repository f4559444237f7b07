"""Experimental structures: quad tori with higher-rank augmentations, blind-spot pairs and the three-vertex Hodge counterexample."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .complex import Cell, CombinatorialComplex, Permutation, build_complex, dump, load, relabel
from .errors import GridTooSmall, InvalidFaceIndex, UnknownMode

__all__ = [
    "TorusSpec",
    "PairInstance",
    "CorpusRanges",
    "MODES",
    "make_torus",
    "torus_face",
    "face_distance",
    "faces_edge_adjacent",
    "make_blindspot_pair",
    "fig4_pair",
    "gen_corpus",
    "gen_controls",
    "random_complex",
    "write_corpus",
    "read_manifest",
]

PRESENT_ABSENT = "present-absent"
ADJACENT_DISTANT = "adjacent-distant"
CONTROL = "control"
MODES = (PRESENT_ABSENT, ADJACENT_DISTANT)

MANIFEST_FIELDS = ["pair_id", "left_file", "right_file", "mode", "m", "n", "seed"]


@dataclass(frozen=True)
class TorusSpec:
    """An ``m x n`` quad torus, optionally augmented.

    Each augmentation ``(rank, (a, b))`` adds one cell of that rank spanning
    the union of rank-2 faces ``a`` and ``b``.
    """

    m: int
    n: int
    max_rank: int = 2
    augmentations: tuple[tuple[int, tuple[int, int]], ...] = ()

    def __post_init__(self):
        if self.m < 3 or self.n < 3:
            raise GridTooSmall(f"torus needs m, n >= 3, got {self.m}x{self.n}")
        if self.max_rank not in (2, 3, 4):
            raise ValueError(f"max_rank must be 2, 3 or 4, got {self.max_rank}")
        augs = tuple((int(r), (int(a), int(b))) for r, (a, b) in self.augmentations)
        n_faces = self.m * self.n
        for r, (a, b) in augs:
            if r not in (3, 4) or r > self.max_rank:
                raise ValueError(f"augmentation rank {r} must be 3 or 4 and at most max_rank={self.max_rank}")
            for f in (a, b):
                if not 0 <= f < n_faces:
                    raise InvalidFaceIndex(f"face index {f} outside [0, {n_faces})")
            if a == b:
                raise InvalidFaceIndex(f"augmentation needs two distinct faces, got ({a}, {b})")
        object.__setattr__(self, "augmentations", augs)


def _vid(i, j, m, n):
    return (i % m) * n + (j % n)


def torus_face(m: int, n: int, f: int) -> tuple[int, ...]:
    """Vertex ids of face ``f = i * n + j`` (the quad with lower-left corner ``(i, j)``)."""
    if not 0 <= f < m * n:
        raise InvalidFaceIndex(f"face index {f} outside [0, {m * n})")
    i, j = divmod(f, n)
    return tuple(sorted({_vid(i, j, m, n), _vid(i, j + 1, m, n), _vid(i + 1, j, m, n), _vid(i + 1, j + 1, m, n)}))


def face_distance(m: int, n: int, a: int, b: int) -> int:
    """Chebyshev distance between two faces on the wrapped face grid."""
    (ia, ja), (ib, jb) = divmod(a, n), divmod(b, n)
    di, dj = abs(ia - ib), abs(ja - jb)
    return max(min(di, m - di), min(dj, n - dj))


def faces_edge_adjacent(m: int, n: int, a: int, b: int) -> bool:
    (ia, ja), (ib, jb) = divmod(a, n), divmod(b, n)
    di, dj = abs(ia - ib), abs(ja - jb)
    di, dj = min(di, m - di), min(dj, n - dj)
    return di + dj == 1


def make_torus(spec: TorusSpec) -> CombinatorialComplex:
    """Quad-grid torus: ``mn`` vertices, ``2mn`` edges, ``mn`` faces, plus augmentations.

    Vertex ``(i, j)`` has id ``i * n + j``.
    """
    m, n = spec.m, spec.n
    cells = [Cell((v,), 0) for v in range(m * n)]
    for i in range(m):
        for j in range(n):
            cells.append(Cell((_vid(i, j, m, n), _vid(i, j + 1, m, n)), 1))
            cells.append(Cell((_vid(i, j, m, n), _vid(i + 1, j, m, n)), 1))
    faces = [torus_face(m, n, f) for f in range(m * n)]
    cells.extend(Cell(f, 2) for f in faces)
    for r, (a, b) in spec.augmentations:
        cells.append(Cell(tuple(set(faces[a]) | set(faces[b])), r))
    return build_complex(cells)


@dataclass(frozen=True)
class PairInstance:
    left: CombinatorialComplex
    right: CombinatorialComplex
    isomorphic: bool
    description: str = ""
    mode: str = ""
    m: int = 0
    n: int = 0
    seed: int = 0


def _edge_neighbours(m, n, a):
    return [b for b in range(m * n) if faces_edge_adjacent(m, n, a, b)]


def make_blindspot_pair(m: int, n: int, mode: str = PRESENT_ABSENT, seed: int = 0) -> PairInstance:
    """Two tori differing only in one rank-4 cell that spans two faces.

    ``present-absent``: the left torus has the cell, the right has none.
    ``adjacent-distant``: the left cell spans two edge-adjacent faces, the
    right spans two faces at Chebyshev distance >= 2. A 3 x 3 face grid has
    no such pair, so there the right cell spans two diagonal neighbours
    (faces sharing exactly one vertex).
    """
    if m < 3 or n < 3:
        raise GridTooSmall(f"torus needs m, n >= 3, got {m}x{n}")
    if mode not in MODES:
        raise UnknownMode(f"unknown mode {mode!r}; expected one of {MODES}")
    rng = np.random.default_rng(seed)
    n_faces = m * n
    a = int(rng.integers(n_faces))
    base = TorusSpec(m, n, max_rank=4)

    if mode == PRESENT_ABSENT:
        b = int(rng.choice([f for f in range(n_faces) if f != a]))
        left = make_torus(TorusSpec(m, n, 4, ((4, (a, b)),)))
        right = make_torus(base)
        desc = f"{m}x{n} torus with vs without a rank-4 cell over faces ({a}, {b})"
    else:
        near = int(rng.choice(_edge_neighbours(m, n, a)))
        far_pool = [f for f in range(n_faces) if face_distance(m, n, a, f) >= 2]
        if not far_pool:
            far_pool = [
                f for f in range(n_faces) if face_distance(m, n, a, f) == 1 and not faces_edge_adjacent(m, n, a, f)
            ]
        far = int(rng.choice(far_pool))
        left = make_torus(TorusSpec(m, n, 4, ((4, (a, near)),)))
        right = make_torus(TorusSpec(m, n, 4, ((4, (a, far)),)))
        desc = f"{m}x{n} torus, rank-4 cell over adjacent faces ({a}, {near}) vs distant faces ({a}, {far})"
    return PairInstance(left, right, False, desc, mode, m, n, seed)


def fig4_pair() -> PairInstance:
    """Three vertices and edge {1, 2}; A adds a rank-4 cell {1, 2, 3}, B does not."""
    a = build_complex([Cell((1, 2), 1), Cell((1, 2, 3), 4)], vertices=[1, 2, 3])
    b = build_complex([Cell((1, 2), 1)], vertices=[1, 2, 3])
    return PairInstance(a, b, False, "Hodge counterexample: rank-4 cell {1,2,3} present vs absent", "fig4")


@dataclass(frozen=True)
class CorpusRanges:
    """Inclusive grid-size ranges and the modes to cycle through."""

    m: tuple[int, int] = (3, 6)
    n: tuple[int, int] = (3, 6)
    modes: tuple[str, ...] = field(default=MODES)


def _pair_seeds(seed: int, count: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]


def gen_corpus(count: int, spec_ranges: CorpusRanges | None = None, seed: int = 0) -> list[PairInstance]:
    """Seeded blind-spot corpus; modes alternate so every listed mode appears once ``count >= len(modes)``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    ranges = spec_ranges or CorpusRanges()
    rng = np.random.default_rng(seed)
    corpus = []
    for i, pair_seed in enumerate(_pair_seeds(seed, count)):
        m = int(rng.integers(ranges.m[0], ranges.m[1] + 1))
        n = int(rng.integers(ranges.n[0], ranges.n[1] + 1))
        mode = ranges.modes[i % len(ranges.modes)]
        corpus.append(make_blindspot_pair(m, n, mode, pair_seed))
    return corpus


def gen_controls(count: int, spec_ranges: CorpusRanges | None = None, seed: int = 0) -> list[PairInstance]:
    """Isomorphic control pairs: an augmented torus and a random relabeling of it."""
    ranges = spec_ranges or CorpusRanges()
    rng = np.random.default_rng(seed)
    out = []
    for i, pair_seed in enumerate(_pair_seeds(seed + 1_000_003, count)):
        m = int(rng.integers(ranges.m[0], ranges.m[1] + 1))
        n = int(rng.integers(ranges.n[0], ranges.n[1] + 1))
        mode = ranges.modes[i % len(ranges.modes)]
        left = make_blindspot_pair(m, n, mode, pair_seed).left
        p = Permutation.random(left.n_vertices, pair_seed)
        out.append(PairInstance(left, relabel(left, p), True, f"{m}x{n} torus vs random relabeling", CONTROL, m, n, pair_seed))
    return out


def random_complex(
    rng,
    n_vertices: int,
    max_rank: int = 4,
    n_cells: int | None = None,
    max_cell_size: int = 4,
    with_features: int = 0,
) -> CombinatorialComplex:
    """Random valid complex on vertices ``0..n_vertices-1``.

    Cells of size >= 2 get random ranks in ``1..max_rank``; ranks are then
    raised where needed (smallest cells first) so the rank function is
    order-preserving.
    """
    rng = np.random.default_rng(rng)
    if n_cells is None:
        n_cells = int(rng.integers(0, 2 * n_vertices + 1))
    top = max(2, min(max_cell_size, n_vertices))
    seen: dict[tuple[int, ...], int] = {}
    if n_vertices >= 2:
        for _ in range(n_cells):
            size = int(rng.integers(2, top + 1))
            verts = tuple(sorted(rng.choice(n_vertices, size=size, replace=False).tolist()))
            seen.setdefault(verts, int(rng.integers(1, max_rank + 1)))
    ordered = sorted(seen, key=len)
    ranks: dict[tuple[int, ...], int] = {}
    for verts in ordered:
        s = set(verts)
        floor = max((ranks[x] for x in ranks if len(x) < len(verts) and s.issuperset(x)), default=1)
        ranks[verts] = max(seen[verts], floor)
    cells = [Cell(v, r) for v, r in ranks.items()]
    feats = rng.normal(size=(n_vertices, with_features)) if with_features else None
    return build_complex(cells, features=feats, vertices=range(n_vertices))


def write_corpus(corpus: list[PairInstance], out_dir) -> Path:
    """Write each pair as two CC files plus ``manifest.csv``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_FIELDS)
        for i, pair in enumerate(corpus):
            left, right = f"pair{i:04d}_left.cc", f"pair{i:04d}_right.cc"
            dump(pair.left, out / left)
            dump(pair.right, out / right)
            writer.writerow([i, left, right, pair.mode, pair.m, pair.n, pair.seed])
    return manifest


def read_manifest(path) -> list[tuple[int, PairInstance]]:
    """Load a manifest written by :func:`write_corpus`; ``mode == "control"`` marks isomorphic pairs."""
    path = Path(path)
    base = path.parent
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            left = load(base / row["left_file"])
            right = load(base / row["right_file"])
            pairs.append(
                (
                    int(row["pair_id"]),
                    PairInstance(
                        left,
                        right,
                        row["mode"] == CONTROL,
                        f"{row['left_file']} vs {row['right_file']}",
                        row["mode"],
                        int(row["m"]),
                        int(row["n"]),
                        int(row["seed"]),
                    ),
                )
            )
    return pairs
