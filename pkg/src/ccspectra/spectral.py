"""Eigendecomposition, heat kernels and heat kernel signatures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .complex import CombinatorialComplex
from .errors import (
    DimensionMismatch,
    InvalidTimeGrid,
    NegativeTime,
    NonPositiveCount,
    NotSymmetric,
    SolverFailure,
    WeightLengthMismatch,
)
from .operators import CcLaplacian, WeightScheme, _weighted_cells, weight_scheme

__all__ = [
    "HeatSpectrum",
    "TimeGrid",
    "HksTable",
    "eigendecompose",
    "heat_kernel",
    "hks",
    "default_grid",
    "smoothness",
    "dirichlet_energy",
]

SYMMETRY_TOL = 1e-10
CLAMP_TOL = 1e-10
RESIDUAL_TOL = 1e-8


def _as_matrix(L) -> np.ndarray:
    if isinstance(L, CcLaplacian):
        return L.matrix
    return np.asarray(L, dtype=np.float64)


@dataclass(frozen=True)
class HeatSpectrum:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        phi = self.eigenvectors
        return (phi * self.eigenvalues) @ phi.T

    def residuals(self, L) -> np.ndarray:
        """``||L v_i - lambda_i v_i||`` per eigenpair."""
        M = _as_matrix(L)
        phi = self.eigenvectors
        return np.linalg.norm(M @ phi - phi * self.eigenvalues, axis=0)


def eigendecompose(L, verify: bool = False) -> HeatSpectrum:
    """Full symmetric eigendecomposition of a Laplacian.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero. Each eigenvector is
    sign-normalised so its first clearly nonzero entry is positive. With
    ``verify=True`` the residual bound ``1e-8 * max(1, |lambda|)`` is checked.
    """
    M = _as_matrix(L)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"expected a square matrix, got shape {M.shape}")
    if M.size and np.max(np.abs(M - M.T)) > SYMMETRY_TOL:
        raise NotSymmetric(f"matrix is not symmetric (max asymmetry {np.max(np.abs(M - M.T)):.3e})")
    try:
        lam, phi = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise SolverFailure(str(exc)) from exc

    lam = np.where((lam < 0) & (lam >= -CLAMP_TOL), 0.0, lam)
    if phi.size:
        nonzero = np.abs(phi) > 1e-12
        first = np.argmax(nonzero, axis=0)
        signs = np.sign(phi[first, np.arange(phi.shape[1])])
        signs[signs == 0] = 1.0
        phi = phi * signs
    s = HeatSpectrum(lam, phi)
    if verify and s.n:
        bad = s.residuals(M) > RESIDUAL_TOL * np.maximum(1.0, np.abs(lam))
        if np.any(bad):
            raise SolverFailure(f"{int(bad.sum())} eigenpairs exceed the residual tolerance")
    lam.setflags(write=False)
    phi.setflags(write=False)
    return s


def heat_kernel(s: HeatSpectrum, t: float) -> np.ndarray:
    """``K_t = Phi diag(exp(-t lambda)) Phi^T``."""
    if t < 0:
        raise NegativeTime(f"diffusion time must be non-negative, got {t}")
    if t == 0:
        return np.eye(s.n)
    phi = s.eigenvectors
    return (phi * np.exp(-t * s.eigenvalues)) @ phi.T


@dataclass(frozen=True)
class TimeGrid:
    times: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(x) for x in self.times)
        if not t:
            raise InvalidTimeGrid("time grid is empty")
        if any(not np.isfinite(x) or x <= 0 for x in t):
            raise InvalidTimeGrid(f"times must be positive and finite, got {t}")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise InvalidTimeGrid(f"times must be strictly increasing, got {t}")
        object.__setattr__(self, "times", t)

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(self.times)

    def as_array(self) -> np.ndarray:
        return np.array(self.times)


def default_grid(d: int = 10, t_max: float = 3.0) -> TimeGrid:
    """``d`` equally spaced times in ``(0, t_max]``: ``t_j = t_max * j / d``."""
    if d < 1:
        raise NonPositiveCount(f"need at least one time, got d={d}")
    return TimeGrid(tuple(t_max * j / d for j in range(1, d + 1)))


@dataclass(frozen=True)
class HksTable:
    """Per-vertex HKS rows; ``values[c, j] = K_{t_j}(c)``."""

    values: np.ndarray
    grid: TimeGrid
    vertices: tuple[int, ...] = ()

    @property
    def shape(self):
        return self.values.shape


def hks(s: HeatSpectrum, grid: TimeGrid, vertices=()) -> HksTable:
    """Heat kernel signature of every rank-0 cell, straight from the spectrum.

    Entries are clipped at 1, the exact upper bound for a PSD Laplacian,
    to absorb rounding in the row norms of ``Phi``.
    """
    if not isinstance(grid, TimeGrid):
        grid = TimeGrid(tuple(grid))
    decay = np.exp(-np.outer(s.eigenvalues, grid.as_array()))
    values = np.minimum((s.eigenvectors**2) @ decay, 1.0)
    values.setflags(write=False)
    return HksTable(values, grid, tuple(vertices))


def smoothness(L, f) -> float:
    """Quadratic form ``f^T L f``."""
    M = _as_matrix(L)
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1 or f.shape[0] != M.shape[0]:
        raise DimensionMismatch(f"f has shape {f.shape}, Laplacian is {M.shape}")
    return float(f @ M @ f)


def dirichlet_energy(cc: CombinatorialComplex, w: WeightScheme | None, f) -> float:
    """``sum_{i<j} omega_ij (f_i - f_j)^2`` with ``omega_ij = sum_k b_k * #(rank-k cells holding i and j)``.

    Evaluated cell by cell from pairwise differences; no Laplacian is formed.
    """
    f = np.ascontiguousarray(f, dtype=np.float64)
    if f.ndim != 1 or f.shape[0] != cc.n_vertices:
        raise DimensionMismatch(f"f has length {f.shape[0] if f.ndim else 0}, complex has {cc.n_vertices} vertices")
    if w is None:
        w = weight_scheme(cc.max_rank)
    if len(w) != cc.max_rank:
        raise WeightLengthMismatch(f"complex has max rank {cc.max_rank} but {len(w)} weights were given")
    indptr, indices, wts = _weighted_cells(cc, w, cc.max_rank)
    return float(kernels.pair_energy(indptr, indices, wts, f))
