"""Pair distinguishing, corpus evaluation, feature encoding and the brute-force isomorphism oracle."""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .complex import CombinatorialComplex
from .errors import DimensionMismatch, RankOutOfRange, TooLarge
from .operators import DIRICHLET, cc_laplacian, hodge_laplacian, normalize_convention
from .spectral import TimeGrid, default_grid, eigendecompose, hks

__all__ = [
    "DISTINGUISHED",
    "INDISTINGUISHABLE",
    "DEFAULT_THRESHOLD",
    "DistinguishReport",
    "PairResult",
    "CorpusReport",
    "EncodedFeatures",
    "parse_laplacian_target",
    "laplacian_matrix",
    "sorted_rows",
    "spectral_distance",
    "descriptor_distance",
    "distinguish",
    "evaluate_corpus",
    "encode_features",
    "hks_feature_table",
    "find_isomorphism",
    "brute_force_isomorphic",
]

DISTINGUISHED = "Distinguished"
INDISTINGUISHABLE = "Indistinguishable"
DEFAULT_THRESHOLD = 1e-6
SORT_QUANTUM = 1e-9
MAX_BRUTE_FORCE_VERTICES = 10


def parse_laplacian_target(target: str) -> tuple[str, int | None]:
    """``"cc"`` -> ``("cc", None)``; ``"hodge:0"`` -> ``("hodge", 0)``."""
    target = str(target).strip().lower()
    if target == "cc":
        return "cc", None
    if target.startswith("hodge:"):
        try:
            k = int(target.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad Hodge rank in {target!r}") from None
        if k < 0:
            raise RankOutOfRange(f"Hodge rank must be >= 0, got {k}")
        return "hodge", k
    raise ValueError(f"unknown Laplacian target {target!r}; use 'cc' or 'hodge:K'")


def laplacian_matrix(cc: CombinatorialComplex, target: str = "cc", convention: str = DIRICHLET, weights=None):
    kind, k = parse_laplacian_target(target)
    if kind == "cc":
        return cc_laplacian(cc, weights, convention).matrix
    return hodge_laplacian(cc, k)


def sorted_rows(values: np.ndarray, quantum: float = SORT_QUANTUM) -> np.ndarray:
    """Rows sorted lexicographically on keys rounded to ``quantum``; the returned rows are unrounded."""
    values = np.asarray(values)
    if values.shape[0] <= 1:
        return values
    keys = np.round(values / quantum)
    order = np.lexsort(keys.T[::-1])
    return values[order]


def spectral_distance(lam_a, lam_b) -> float:
    lam_a, lam_b = np.sort(lam_a), np.sort(lam_b)
    if lam_a.shape != lam_b.shape:
        return float("inf")
    return float(np.max(np.abs(lam_a - lam_b))) if lam_a.size else 0.0


def descriptor_distance(table_a, table_b) -> float:
    a, b = sorted_rows(table_a), sorted_rows(table_b)
    if a.shape != b.shape:
        return float("inf")
    return float(np.max(np.abs(a - b))) if a.size else 0.0


@dataclass(frozen=True)
class DistinguishReport:
    spectral_distance: float
    descriptor_distance: float
    verdict: str
    convention: str
    laplacian: str
    grid: TimeGrid
    threshold: float

    @property
    def distinguished(self) -> bool:
        return self.verdict == DISTINGUISHED


def _signature(cc, target, convention, grid):
    s = eigendecompose(laplacian_matrix(cc, target, convention))
    return s.eigenvalues, hks(s, grid).values


def distinguish(
    a: CombinatorialComplex,
    b: CombinatorialComplex,
    grid: TimeGrid | None = None,
    convention: str = DIRICHLET,
    threshold: float = DEFAULT_THRESHOLD,
    laplacian: str = "cc",
) -> DistinguishReport:
    """Compare two complexes by sorted spectra and sorted HKS row multisets.

    ``Indistinguishable`` only means the invariant does not separate the
    pair; it never certifies isomorphism.
    """
    grid = grid or default_grid()
    convention = normalize_convention(convention)
    if a.n_vertices != b.n_vertices:
        inf = float("inf")
        return DistinguishReport(inf, inf, DISTINGUISHED, convention, laplacian, grid, threshold)
    lam_a, h_a = _signature(a, laplacian, convention, grid)
    lam_b, h_b = _signature(b, laplacian, convention, grid)
    sd = spectral_distance(lam_a, lam_b)
    dd = descriptor_distance(h_a, h_b)
    verdict = DISTINGUISHED if max(sd, dd) > threshold else INDISTINGUISHABLE
    return DistinguishReport(sd, dd, verdict, convention, laplacian, grid, threshold)


@dataclass(frozen=True)
class PairResult:
    pair_id: int
    mode: str
    isomorphic: bool
    report: DistinguishReport
    baseline: DistinguishReport | None = None
    oracle_isomorphic: bool | None = None


@dataclass
class CorpusReport:
    rows: list[PairResult] = field(default_factory=list)

    def _rate(self, results, isomorphic: bool, baseline=False, mode=None):
        hits = total = 0
        for r in results:
            if r.isomorphic != isomorphic or (mode is not None and r.mode != mode):
                continue
            rep = r.baseline if baseline else r.report
            if rep is None:
                continue
            total += 1
            hits += rep.distinguished
        return hits / total if total else float("nan")

    def accuracy(self, mode: str | None = None) -> float:
        """Fraction of non-isomorphic pairs that were distinguished."""
        return self._rate(self.rows, False, mode=mode)

    def baseline_accuracy(self, mode: str | None = None) -> float:
        return self._rate(self.rows, False, baseline=True, mode=mode)

    def false_positive_rate(self) -> float:
        """Fraction of isomorphic pairs wrongly reported as distinguished."""
        return self._rate(self.rows, True)

    @property
    def all_distinguished(self) -> bool:
        return all(r.report.distinguished for r in self.rows if not r.isomorphic)


def evaluate_corpus(
    corpus,
    grid: TimeGrid | None = None,
    convention: str = DIRICHLET,
    threshold: float = DEFAULT_THRESHOLD,
    laplacian: str = "cc",
    baseline: str | None = "hodge:0",
    oracle: bool = False,
    threads: int = 1,
) -> CorpusReport:
    """Run :func:`distinguish` on every pair (and the ``baseline`` target for contrast).

    ``corpus`` is a list of :class:`PairInstance` or ``(pair_id, PairInstance)``
    tuples. With ``oracle=True`` small pairs (<= 10 vertices) are also
    checked by brute-force isomorphism search. Row order follows pair ids
    regardless of ``threads``.
    """
    items = [p if isinstance(p, tuple) else (i, p) for i, p in enumerate(corpus)]
    if not items:
        raise ValueError("corpus is empty")
    grid = grid or default_grid()

    def run(item):
        pair_id, pair = item
        rep = distinguish(pair.left, pair.right, grid, convention, threshold, laplacian)
        base = None
        if baseline:
            base = distinguish(pair.left, pair.right, grid, convention, threshold, baseline)
        iso = None
        if oracle and pair.left.n_vertices <= MAX_BRUTE_FORCE_VERTICES:
            iso = brute_force_isomorphic(pair.left, pair.right)
        return PairResult(pair_id, pair.mode, pair.isomorphic, rep, base, iso)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, items))
    else:
        rows = [run(it) for it in items]
    rows.sort(key=lambda r: r.pair_id)
    return CorpusReport(rows)


@dataclass(frozen=True)
class EncodedFeatures:
    """``matrix = [sin(X G) | cos(X G)]`` and the basis ``G`` that produced it."""

    matrix: np.ndarray
    basis: np.ndarray


def encode_features(X, G=None, E: int = 32, seed: int = 0) -> EncodedFeatures:
    """Sinusoidal encoding of per-vertex features.

    When ``G`` is omitted a ``D x E`` standard-normal basis is drawn from ``seed``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if G is None:
        G = np.random.default_rng(seed).standard_normal((X.shape[1], E))
    G = np.atleast_2d(np.asarray(G, dtype=np.float64))
    if X.shape[1] != G.shape[0]:
        raise DimensionMismatch(f"X is {X.shape} but G is {G.shape}")
    proj = X @ G
    return EncodedFeatures(np.concatenate([np.sin(proj), np.cos(proj)], axis=1), G)


def hks_feature_table(
    cc: CombinatorialComplex, grid: TimeGrid | None = None, convention: str = DIRICHLET, weights=None
) -> np.ndarray:
    """``[features | HKS]`` per rank-0 cell, or just the HKS table when there are no features."""
    grid = grid or default_grid()
    table = hks(eigendecompose(cc_laplacian(cc, weights, convention)), grid).values
    if cc.features is None or cc.features.shape[1] == 0:
        return np.array(table)
    return np.concatenate([cc.features, table], axis=1)


# ---------------------------------------------------------------------------
# brute-force isomorphism


def _vertex_signatures(cc: CombinatorialComplex):
    sigs = [Counter() for _ in range(cc.n_vertices)]
    pos = cc.index
    for c in cc.cells:
        if c.size == 1:
            continue
        for v in c.vertices:
            sigs[pos[v]][(c.rank, c.size)] += 1
    return [tuple(sorted(s.items())) for s in sigs]


def _cell_profile(cc: CombinatorialComplex):
    return Counter((c.rank, c.size) for c in cc.cells)


def find_isomorphism(a: CombinatorialComplex, b: CombinatorialComplex, max_vertices: int = MAX_BRUTE_FORCE_VERTICES):
    """Exhaustive search for a vertex bijection mapping ``a``'s (cell, rank) set onto ``b``'s.

    Returns ``{vertex of a: vertex of b}`` or ``None``. The search is
    complete; vertex-signature compatibility only prunes branches that
    cannot succeed.
    """
    n = a.n_vertices
    if max(n, b.n_vertices) > max_vertices:
        raise TooLarge(f"brute-force search limited to {max_vertices} vertices, got {max(n, b.n_vertices)}")
    if n != b.n_vertices or _cell_profile(a) != _cell_profile(b):
        return None
    if n == 0:
        return {}

    sig_a, sig_b = _vertex_signatures(a), _vertex_signatures(b)
    compat_orig = np.array([[sa == sb for sb in sig_b] for sa in sig_a], dtype=np.uint8)
    # most constrained vertices first
    order = sorted(range(n), key=lambda i: (int(compat_orig[i].sum()), -len(sig_a[i])))
    new_pos = {old: new for new, old in enumerate(order)}
    compat = np.ascontiguousarray(compat_orig[order])

    pos_a, pos_b = a.index, b.index
    max_r = max(a.max_rank, b.max_rank)
    table = np.zeros((max_r + 1) << n, dtype=np.uint8)
    for c in b.cells:
        mask = 0
        for v in c.vertices:
            mask |= 1 << pos_b[v]
        table[(c.rank << n) | mask] = 1

    groups: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for c in a.cells:
        if c.size == 1:
            continue
        ps = [new_pos[pos_a[v]] for v in c.vertices]
        mask = 0
        for p in ps:
            mask |= 1 << p
        groups[max(ps)].append((mask, c.rank))
    starts = np.zeros(n + 1, dtype=np.int64)
    starts[1:] = np.cumsum([len(g) for g in groups])
    masks = np.array([m for g in groups for m, _ in g], dtype=np.int64)
    ranks = np.array([r for g in groups for _, r in g], dtype=np.int64)

    perm = kernels.iso_search(n, compat, starts, masks, ranks, table)
    if perm is None:
        return None
    return {a.vertices[order[d]]: b.vertices[int(perm[d])] for d in range(n)}


def brute_force_isomorphic(a: CombinatorialComplex, b: CombinatorialComplex, max_vertices: int = MAX_BRUTE_FORCE_VERTICES) -> bool:
    return find_isomorphism(a, b, max_vertices) is not None
