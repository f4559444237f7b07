"""Combinatorial complexes: construction, validation, relabeling and (de)serialization."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CCSyntaxError,
    EmptyCell,
    FeatureShapeMismatch,
    InvalidPermutation,
    NegativeRank,
    PermutationSizeMismatch,
    RankViolation,
    SelfLoop,
)

__all__ = [
    "Cell",
    "CombinatorialComplex",
    "Permutation",
    "build_complex",
    "from_graph",
    "from_simplicial",
    "relabel",
    "parse",
    "serialize",
    "load",
    "dump",
]


@dataclass(frozen=True)
class Cell:
    """A cell: a nonempty vertex set plus its rank.

    ``vertices`` is normalised to a strictly increasing tuple, so
    ``Cell((2, 1), 1) == Cell((1, 2), 1)``.
    """

    vertices: tuple[int, ...]
    rank: int

    def __post_init__(self):
        try:
            verts = tuple(sorted({int(v) for v in self.vertices}))
        except TypeError:
            raise EmptyCell(f"cell vertices must be an iterable of integers, got {self.vertices!r}")
        if not verts:
            raise EmptyCell("cell has no vertices")
        if verts[0] < 0:
            raise ValueError(f"vertex ids must be non-negative, got {verts[0]}")
        rank = int(self.rank)
        if rank < 0:
            raise NegativeRank(f"cell {list(verts)} has negative rank {rank}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "rank", rank)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def sort_key(self):
        return (self.rank, self.vertices)

    def __repr__(self):
        return f"Cell({list(self.vertices)}, rank={self.rank})"


def _as_cell(obj) -> Cell:
    if isinstance(obj, Cell):
        return obj
    if isinstance(obj, Mapping):
        return Cell(tuple(obj["vertices"]), obj["rank"])
    verts, rank = obj
    return Cell(tuple(verts), rank)


@dataclass(frozen=True, eq=False)
class CombinatorialComplex:
    """Validated combinatorial complex over integer vertex ids.

    Instances are immutable; build them with :func:`build_complex` (or the
    ``from_*`` helpers) rather than calling the constructor directly.
    Cells are kept in canonical order: ranks ascending, then vertex tuples
    lexicographically.
    """

    vertices: tuple[int, ...]
    cells: tuple[Cell, ...]
    features: np.ndarray | None = field(default=None)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @cached_property
    def max_rank(self) -> int:
        return max(c.rank for c in self.cells)

    @cached_property
    def index(self) -> dict[int, int]:
        """Vertex id -> row position."""
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _by_rank(self) -> dict[int, tuple[Cell, ...]]:
        groups: dict[int, list[Cell]] = {}
        for c in self.cells:
            groups.setdefault(c.rank, []).append(c)
        return {r: tuple(cs) for r, cs in groups.items()}

    @property
    def ranks(self) -> list[int]:
        return sorted(self._by_rank)

    def cells_of_rank(self, k: int) -> tuple[Cell, ...]:
        return self._by_rank.get(k, ())

    def rank_counts(self) -> dict[int, int]:
        return {r: len(cs) for r, cs in sorted(self._by_rank.items())}

    def cell_arrays(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """CSR-style ``(indptr, indices)`` of the rank-``k`` cells over vertex positions.

        Indices within a cell are ascending, so the first entry is the
        smallest vertex id.
        """
        cache = self.__dict__.setdefault("_csr_cache", {})
        if k not in cache:
            cells = self.cells_of_rank(k)
            indptr = np.zeros(len(cells) + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([c.size for c in cells], dtype=np.int64)
            pos = self.index
            indices = np.fromiter(
                (pos[v] for c in cells for v in c.vertices), dtype=np.int64, count=int(indptr[-1])
            )
            indptr.setflags(write=False)
            indices.setflags(write=False)
            cache[k] = (indptr, indices)
        return cache[k]

    def __eq__(self, other):
        if not isinstance(other, CombinatorialComplex):
            return NotImplemented
        if self.vertices != other.vertices or self.cells != other.cells:
            return False
        if self.features is None or other.features is None:
            return self.features is None and other.features is None
        return self.features.shape == other.features.shape and bool(
            np.array_equal(self.features, other.features)
        )

    def __hash__(self):
        return hash((self.vertices, self.cells))

    def __repr__(self):
        feats = "" if self.features is None else f", features={self.features.shape[1]}"
        return (
            f"CombinatorialComplex(n_vertices={self.n_vertices}, n_cells={self.n_cells}, "
            f"max_rank={self.max_rank}{feats})"
        )


def _check_order_preserving(cells: Sequence[Cell]) -> None:
    # singletons are fixed at rank 0, so only non-singleton pairs need checking
    big = [c for c in cells if c.size > 1]
    containing: dict[int, list[int]] = {}
    for j, c in enumerate(big):
        for v in c.vertices:
            containing.setdefault(v, []).append(j)
    sets = [frozenset(c.vertices) for c in big]
    for i, x in enumerate(big):
        pivot = min(x.vertices, key=lambda v: len(containing[v]))
        for j in containing[pivot]:
            y = big[j]
            if y.size <= x.size or x.rank <= y.rank:
                continue
            if sets[i] <= sets[j]:
                raise RankViolation(
                    f"cell {list(x.vertices)} (rank {x.rank}) is contained in cell "
                    f"{list(y.vertices)} (rank {y.rank}) of lower rank"
                )


def build_complex(
    cells: Iterable,
    features=None,
    vertices: Iterable[int] | None = None,
) -> CombinatorialComplex:
    """Validate ``cells`` and return a :class:`CombinatorialComplex`.

    ``cells`` may hold :class:`Cell` objects, ``(vertices, rank)`` pairs or
    ``{"vertices": ..., "rank": ...}`` mappings. Singleton cells are inserted
    for every vertex that only appears inside larger cells (and for every id
    in ``vertices``). Duplicate ``(vertices, rank)`` pairs collapse.

    Raises
    ------
    RankViolation
        If some ``x ⊆ y`` has ``rank(x) > rank(y)``, a singleton has nonzero
        rank, or a rank-0 cell has more than one vertex.
    NegativeRank
    FeatureShapeMismatch
        If ``features`` does not have one row per vertex.
    """
    cell_set = {_as_cell(c) for c in cells}
    declared = {int(v) for v in vertices} if vertices is not None else set()
    if not cell_set and not declared:
        raise EmptyCell("a combinatorial complex needs at least one cell")

    for c in cell_set:
        if c.size == 1 and c.rank != 0:
            raise RankViolation(f"singleton cell {list(c.vertices)} must have rank 0, got {c.rank}")

    all_vertices = set(declared)
    for c in cell_set:
        all_vertices.update(c.vertices)
    for v in all_vertices:
        if v < 0:
            raise ValueError(f"vertex ids must be non-negative, got {v}")
        cell_set.add(Cell((v,), 0))

    ordered = tuple(sorted(cell_set, key=lambda c: c.sort_key))
    _check_order_preserving(ordered)
    for c in ordered:
        if c.size > 1 and c.rank == 0:
            raise RankViolation(
                f"cell {list(c.vertices)} has rank 0 but more than one vertex; "
                "rank-0 cells must be singletons"
            )

    verts = tuple(sorted(all_vertices))
    feats = None
    if features is not None:
        feats = np.array(features, dtype=np.float64)
        if feats.ndim == 1 and feats.size == 0 and len(verts) == 0:
            feats = feats.reshape(0, 0)
        if feats.ndim != 2 or feats.shape[0] != len(verts):
            raise FeatureShapeMismatch(
                f"features must have one row per rank-0 cell ({len(verts)}), got shape {feats.shape}"
            )
        feats.setflags(write=False)
    return CombinatorialComplex(verts, ordered, feats)


def from_graph(edges: Iterable[tuple[int, int]], vertices: Iterable[int] | None = None, features=None):
    """Graph as a rank-1 complex: vertices become rank-0 cells, edges rank-1 cells."""
    cells = []
    for u, v in edges:
        if u == v:
            raise SelfLoop(f"self-loop on vertex {u}")
        cells.append(Cell((u, v), 1))
    return build_complex(cells, features=features, vertices=vertices)


def from_simplicial(maximal_simplices: Iterable[Iterable[int]], features=None) -> CombinatorialComplex:
    """Downward closure of ``maximal_simplices``; a k-simplex gets rank k."""
    from itertools import combinations

    faces: set[tuple[int, ...]] = set()
    for simplex in maximal_simplices:
        verts = tuple(sorted(set(simplex)))
        if not verts:
            raise EmptyCell("empty simplex")
        for size in range(1, len(verts) + 1):
            faces.update(combinations(verts, size))
    return build_complex([Cell(f, len(f) - 1) for f in faces], features=features)


@dataclass(frozen=True)
class Permutation:
    """Bijection of vertex positions ``0..n-1``; position ``i`` is sent to ``mapping[i]``."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(i) for i in self.mapping)
        if sorted(m) != list(range(len(m))):
            raise InvalidPermutation(f"not a bijection of 0..{len(m) - 1}: {m}")
        object.__setattr__(self, "mapping", m)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n: int, rng=None) -> "Permutation":
        rng = np.random.default_rng(rng)
        return cls(tuple(rng.permutation(n).tolist()))

    @classmethod
    def from_vertex_map(cls, cc: CombinatorialComplex, vmap: Mapping[int, int]) -> "Permutation":
        """Build from a vertex-id renaming such as ``{1: 2, 2: 3, 3: 1}``; unmapped ids stay fixed."""
        pos = cc.index
        return cls(tuple(pos[vmap.get(v, v)] for v in cc.vertices))

    def __len__(self):
        return len(self.mapping)

    def __getitem__(self, i):
        return self.mapping[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """``self ∘ other``: apply ``other`` first."""
        if len(self) != len(other):
            raise PermutationSizeMismatch("cannot compose permutations of different sizes")
        return Permutation(tuple(self.mapping[j] for j in other.mapping))

    def inverse(self) -> "Permutation":
        inv = [0] * len(self)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))

    def matrix(self) -> np.ndarray:
        """Permutation matrix ``P`` with ``P[p(i), i] = 1``, so ``(P x)[p(i)] = x[i]``."""
        n = len(self)
        P = np.zeros((n, n))
        P[list(self.mapping), np.arange(n)] = 1.0
        return P


def relabel(cc: CombinatorialComplex, p: Permutation) -> CombinatorialComplex:
    """Rename the vertex at position ``i`` to the id at position ``p[i]``.

    Cell structure, ranks and the vertex id set are preserved; feature rows
    move with their vertices.
    """
    if len(p) != cc.n_vertices:
        raise PermutationSizeMismatch(
            f"permutation has size {len(p)} but the complex has {cc.n_vertices} vertices"
        )
    pos = cc.index
    rename = {v: cc.vertices[p[pos[v]]] for v in cc.vertices}
    cells = tuple(
        sorted((Cell(tuple(rename[v] for v in c.vertices), c.rank) for c in cc.cells), key=lambda c: c.sort_key)
    )
    feats = None
    if cc.features is not None:
        feats = np.empty_like(cc.features)
        feats[list(p.mapping)] = cc.features
        feats.setflags(write=False)
    return CombinatorialComplex(cc.vertices, cells, feats)


# ---------------------------------------------------------------------------
# text format

def serialize(cc: CombinatorialComplex) -> str:
    """Canonical JSON document: one cell per line, singletons included."""
    lines = ["{", f'  "vertices": {json.dumps(list(cc.vertices))},', '  "cells": [']
    body = [
        f'    {{"vertices": {json.dumps(list(c.vertices))}, "rank": {c.rank}}}' for c in cc.cells
    ]
    lines.append(",\n".join(body))
    if cc.features is None:
        lines.append("  ]")
    else:
        lines.append("  ],")
        lines.append('  "features": [')
        rows = [f"    {json.dumps([float(x) for x in row])}" for row in cc.features]
        lines.append(",\n".join(rows))
        lines.append("  ]")
    lines.append("}")
    return "\n".join(line for line in lines if line) + "\n"


def _expect_int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise CCSyntaxError(f"expected an integer, got {value!r}", where)
    return value


def parse(document: str) -> CombinatorialComplex:
    """Parse a CC JSON document (see :func:`serialize`)."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise CCSyntaxError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise CCSyntaxError("top level must be an object", "line 1")

    raw_vertices = doc.get("vertices", [])
    if not isinstance(raw_vertices, list):
        raise CCSyntaxError("must be a list of integers", "vertices")
    vertices = [_expect_int(v, f"vertices[{i}]") for i, v in enumerate(raw_vertices)]

    if "cells" not in doc:
        raise CCSyntaxError('missing required field "cells"', "cells")
    raw_cells = doc["cells"]
    if not isinstance(raw_cells, list):
        raise CCSyntaxError("must be a list of cell objects", "cells")
    cells = []
    for i, item in enumerate(raw_cells):
        where = f"cells[{i}]"
        if not isinstance(item, dict):
            raise CCSyntaxError("cell must be an object", where)
        for key in ("vertices", "rank"):
            if key not in item:
                raise CCSyntaxError(f'missing required field "{key}"', where)
        verts = item["vertices"]
        if not isinstance(verts, list) or not verts:
            raise CCSyntaxError("must be a nonempty list of integers", f"{where}.vertices")
        verts = [_expect_int(v, f"{where}.vertices[{j}]") for j, v in enumerate(verts)]
        rank = _expect_int(item["rank"], f"{where}.rank")
        cells.append(Cell(tuple(verts), rank))

    features = doc.get("features")
    if features is not None:
        if not isinstance(features, list) or not all(isinstance(r, list) for r in features):
            raise CCSyntaxError("must be a list of lists of numbers", "features")
        for i, row in enumerate(features):
            for j, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise CCSyntaxError(f"expected a number, got {x!r}", f"features[{i}][{j}]")
        if len({len(r) for r in features}) > 1:
            raise CCSyntaxError("rows have different lengths", "features")
        if not features:
            features = np.zeros((0, 0))
    return build_complex(cells, features=features, vertices=vertices)


def load(path) -> CombinatorialComplex:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(cc: CombinatorialComplex, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(cc))
