"""Signed incidence, CC Laplacian, boundary operators and Hodge Laplacians."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from . import kernels
from .complex import Cell, CombinatorialComplex
from .errors import (
    RankOutOfRange,
    UnknownConvention,
    UnknownScheme,
    WeightLengthMismatch,
)

__all__ = [
    "SignedIncidence",
    "WeightScheme",
    "CcLaplacian",
    "BoundaryOperator",
    "SIGNED",
    "DIRICHLET",
    "normalize_convention",
    "incidence",
    "weight_scheme",
    "cc_laplacian",
    "boundary",
    "hodge_laplacian",
]

SIGNED = "signed"
DIRICHLET = "dirichlet"

_CONVENTIONS = {
    "signed": SIGNED,
    "signed-incidence": SIGNED,
    "signedincidence": SIGNED,
    "dirichlet": DIRICHLET,
}

# exhaustive subset-sum check is 2**R sums
MAX_VERIFIED_RANK = 20


def normalize_convention(name: str) -> str:
    try:
        return _CONVENTIONS[str(name).lower()]
    except KeyError:
        raise UnknownConvention(f"unknown convention {name!r}; use 'signed' or 'dirichlet'") from None


@dataclass(frozen=True)
class SignedIncidence:
    """Rank-0 x rank-k signed incidence ``delta_k`` (sparse CSR)."""

    matrix: sp.csr_matrix
    rank: int

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True)
class BoundaryOperator:
    """Signed map from rank-k cells to their rank-(k-1) faces."""

    matrix: sp.csr_matrix
    rank: int

    @property
    def shape(self):
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _distinct_subset_sums(weights) -> bool:
    sums = np.zeros(1)
    for b in weights:
        sums = np.concatenate([sums, sums + b])
    return np.unique(sums).size == sums.size


@dataclass(frozen=True)
class WeightScheme:
    """Per-rank weights ``b_1..b_R`` (``weights[i - 1]`` is ``b_i``)."""

    weights: tuple[float, ...]
    kind: str = "custom"

    def __post_init__(self):
        w = tuple(float(b) for b in self.weights)
        if any(not np.isfinite(b) or b <= 0 for b in w):
            raise ValueError(f"weights must be finite and strictly positive, got {w}")
        if len(w) <= MAX_VERIFIED_RANK and not _distinct_subset_sums(w):
            raise ValueError(f"weights {w} have two subsets with equal sums")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, rank: int) -> float:
        """Weight of ``rank`` (1-based, like ``b_rank``)."""
        if rank < 1 or rank > len(self.weights):
            raise RankOutOfRange(f"no weight for rank {rank}")
        return self.weights[rank - 1]

    @property
    def max_rank(self) -> int:
        return len(self.weights)


def weight_scheme(R: int, kind: str = "dyadic") -> WeightScheme:
    """Default weights for a complex of maximum rank ``R``.

    ``dyadic`` gives ``b_i = 2**(1 - i)``: ``b_1 = 1`` keeps the rank-1 part
    equal to the graph Laplacian, and powers of two have distinct subset sums.
    """
    if R < 0:
        raise ValueError(f"R must be non-negative, got {R}")
    if kind != "dyadic":
        raise UnknownScheme(f"unknown weight scheme {kind!r}")
    return WeightScheme(tuple(float(Fraction(1, 2 ** (i - 1))) for i in range(1, R + 1)), "dyadic")


def _check_rank(cc: CombinatorialComplex, k: int, low: int) -> None:
    if k < low or k > cc.max_rank:
        raise RankOutOfRange(f"rank {k} outside [{low}, {cc.max_rank}]")


def incidence(cc: CombinatorialComplex, k: int) -> SignedIncidence:
    """``delta_k``: +1 on the smallest vertex of each rank-k cell, -1 on its other vertices."""
    _check_rank(cc, k, 1)
    indptr, indices = cc.cell_arrays(k)
    data = -np.ones(indices.size)
    data[indptr[:-1][np.diff(indptr) > 0]] = 1.0
    # CSR over columns is CSC over the transposed problem
    mat = sp.csc_matrix((data, indices, indptr), shape=(cc.n_vertices, len(indptr) - 1)).tocsr()
    return SignedIncidence(mat, k)


@dataclass(frozen=True)
class CcLaplacian:
    """Dense symmetric Laplacian over the rank-0 cells (rows follow ``vertices``)."""

    matrix: np.ndarray
    weights: WeightScheme
    convention: str
    vertices: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _weighted_cells(cc: CombinatorialComplex, w: WeightScheme, upto: int):
    ptrs, idxs, wts = [np.zeros(1, dtype=np.int64)], [], []
    offset = 0
    for r in range(1, upto + 1):
        indptr, indices = cc.cell_arrays(r)
        if indices.size == 0:
            continue
        ptrs.append(indptr[1:] + offset)
        idxs.append(indices)
        wts.append(np.full(len(indptr) - 1, w[r]))
        offset += int(indptr[-1])
    if not idxs:
        return ptrs[0], np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(ptrs), np.concatenate(idxs), np.concatenate(wts)


def cc_laplacian(
    cc: CombinatorialComplex,
    w: WeightScheme | None = None,
    convention: str = DIRICHLET,
    upto: int | None = None,
) -> CcLaplacian:
    """CC Laplacian over ranks ``1..R``.

    ``convention="dirichlet"`` (default): each rank contributes
    ``b_i (D_i - A_i)``, where ``A_i`` counts the rank-i cells shared by two
    vertices. ``convention="signed"``: the literal ``sum_i b_i delta_i delta_i^T``.
    The two agree when every cell of rank >= 1 has exactly two vertices.

    The signed form depends on which vertex of a cell carries the +1, so
    for cells with three or more vertices it is not invariant under
    relabeling; use it for inspection, not for comparing complexes.

    ``upto`` truncates the sum at rank ``upto`` (the partial Laplacian
    ``L(r)``); it defaults to the full sum.
    """
    convention = normalize_convention(convention)
    R = cc.max_rank
    if w is None:
        w = weight_scheme(R)
    if len(w) != R:
        raise WeightLengthMismatch(f"complex has max rank {R} but {len(w)} weights were given")
    upto = R if upto is None else min(int(upto), R)
    indptr, indices, wts = _weighted_cells(cc, w, upto)
    if convention == SIGNED:
        mat = kernels.signed_gram(cc.n_vertices, indptr, indices, wts)
    else:
        mat = kernels.comember_laplacian(cc.n_vertices, indptr, indices, wts)
    mat.setflags(write=False)
    return CcLaplacian(mat, w, convention, cc.vertices)


def _faces_by_cell(cc: CombinatorialComplex, k: int):
    lower = cc.cells_of_rank(k - 1)
    containing: dict[int, list[int]] = {}
    for i, f in enumerate(lower):
        for v in f.vertices:
            containing.setdefault(v, []).append(i)
    lower_sets = [frozenset(f.vertices) for f in lower]
    for y in cc.cells_of_rank(k):
        ys = frozenset(y.vertices)
        cand = set()
        for v in y.vertices:
            cand.update(containing.get(v, ()))
        # lower is in canonical (lexicographic) order, so sorted indices are lexicographic faces
        yield sorted(i for i in cand if lower_sets[i] < ys)


def boundary(cc: CombinatorialComplex, k: int) -> BoundaryOperator:
    """``d_k`` from rank-k cells to rank-(k-1) faces.

    Faces of a column are taken in lexicographic order with signs
    ``+1, -1, +1, ...``; on simplices this is the usual alternating boundary
    up to a global sign per rank.
    """
    _check_rank(cc, k, 1)
    rows, cols, vals = [], [], []
    for j, faces in enumerate(_faces_by_cell(cc, k)):
        for pos, i in enumerate(faces):
            rows.append(i)
            cols.append(j)
            vals.append(1.0 if pos % 2 == 0 else -1.0)
    shape = (len(cc.cells_of_rank(k - 1)), len(cc.cells_of_rank(k)))
    return BoundaryOperator(sp.csr_matrix((vals, (rows, cols)), shape=shape), k)


def hodge_laplacian(cc: CombinatorialComplex, k: int) -> np.ndarray:
    """Dense ``Delta_k = d_{k+1} d_{k+1}^T + d_k^T d_k`` over rank-k cells."""
    _check_rank(cc, k, 0)
    n_k = len(cc.cells_of_rank(k))
    out = np.zeros((n_k, n_k))
    if k + 1 <= cc.max_rank:
        up = boundary(cc, k + 1).matrix
        out += (up @ up.T).toarray()
    if k >= 1:
        down = boundary(cc, k).matrix
        out += (down.T @ down).toarray()
    return out


def cells_label(cell: Cell) -> str:
    """Compact label for CSV headers, e.g. ``1-2-3@4``."""
    return "-".join(str(v) for v in cell.vertices) + f"@{cell.rank}"
