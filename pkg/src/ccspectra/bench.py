"""Timing harness: per-phase pipeline timings and compiled-vs-fallback kernel comparison."""
from __future__ import annotations

import math
import statistics
import time
from dataclasses import asdict, dataclass, fields

import numpy as np

from .analysis import find_isomorphism
from .complex import from_graph
from .datasets import TorusSpec, make_torus
from .operators import _weighted_cells, cc_laplacian, weight_scheme
from .spectral import default_grid, eigendecompose, hks


@dataclass(frozen=True)
class BenchRecord:
    n_vertices: int
    n_cells: int
    build_ms: float
    eig_ms: float
    hks_ms: float
    repetitions: int

    @classmethod
    def header(cls):
        return [f.name for f in fields(cls)]

    def row(self):
        return list(asdict(self).values())


def torus_dims(size: int) -> tuple[int, int]:
    """Grid dimensions of a torus with roughly ``size`` rank-0 cells (each side >= 3)."""
    side = max(3, int(round(math.sqrt(size))))
    return side, side


def _ms(fn, reps):
    times, out = [], None
    for _ in range(reps):
        t0 = time.perf_counter()
        out = fn()
        times.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(times), out


def bench_pipeline(sizes, reps: int = 5, convention: str = "dirichlet", grid=None) -> list[BenchRecord]:
    """Median build / eigendecomposition / HKS times on tori of the requested sizes."""
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    grid = grid or default_grid()
    records = []
    for size in sizes:
        cc = make_torus(TorusSpec(*torus_dims(size)))
        build_ms, L = _ms(lambda: cc_laplacian(cc, None, convention), reps)
        eig_ms, s = _ms(lambda: eigendecompose(L), reps)
        hks_ms, _ = _ms(lambda: hks(s, grid), reps)
        records.append(BenchRecord(cc.n_vertices, cc.n_cells, build_ms, eig_ms, hks_ms, reps))
    return records


def _cycle_pair(n: int):
    """An n-cycle and two disjoint n/2-cycles: equal vertex signatures, not isomorphic."""
    h = n // 2
    one = from_graph([(i, (i + 1) % n) for i in range(n)])
    two = from_graph([(i, (i + 1) % h) for i in range(h)] + [(h + i, h + (i + 1) % h) for i in range(h)])
    return one, two


def bench_kernels(sizes, reps: int = 5, iso_sizes=(10,)) -> list[dict]:
    """Time each kernel under every available backend on the same inputs.

    Assembly kernels run on augmented tori of the requested sizes; the
    isomorphism search runs to exhaustion on cycle pairs of ``iso_sizes``
    vertices (even, at most 10).
    """
    from . import kernels

    backends = kernels.backends()
    rows = []

    def record(kernel, n, backend, ms):
        rows.append({"kernel": kernel, "n_vertices": n, "backend": backend, "median_ms": ms, "repetitions": reps})

    for size in sizes:
        cc = make_torus(TorusSpec(*torus_dims(size), 4, ((4, (0, 1)),)))
        w = weight_scheme(cc.max_rank)
        indptr, indices, wts = _weighted_cells(cc, w, cc.max_rank)
        f = np.random.default_rng(0).normal(size=cc.n_vertices)
        n = cc.n_vertices
        for name, mod in backends.items():
            record("signed_gram", n, name, _ms(lambda: mod.signed_gram(n, indptr, indices, wts), reps)[0])
            record("comember_laplacian", n, name, _ms(lambda: mod.comember_laplacian(n, indptr, indices, wts), reps)[0])
            record("pair_energy", n, name, _ms(lambda: mod.pair_energy(indptr, indices, wts, f), reps)[0])

    for size in iso_sizes:
        cc, other = _cycle_pair(size)
        for name, mod in backends.items():
            saved = kernels.iso_search
            kernels.iso_search = mod.iso_search
            try:
                ms, _ = _ms(lambda: find_isomorphism(cc, other), reps)
            finally:
                kernels.iso_search = saved
            record("iso_search", cc.n_vertices, name, ms)
    return rows
