from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ccspectra.complex import Cell, Permutation, build_complex, from_graph, from_simplicial, relabel
from ccspectra.datasets import fig4_pair, random_complex
from ccspectra.errors import RankOutOfRange, UnknownScheme, WeightLengthMismatch
from ccspectra.operators import (
    WeightScheme,
    boundary,
    cc_laplacian,
    hodge_laplacian,
    incidence,
    weight_scheme,
)

from conftest import complexes

EDGE_L = np.array([[1.0, -1.0], [-1.0, 1.0]])


# -- oracles written directly from the definitions, no shared code paths -----

def dense_delta(cc, k):
    cols = cc.cells_of_rank(k)
    out = np.zeros((cc.n_vertices, len(cols)))
    for j, y in enumerate(cols):
        for v in y.vertices:
            out[cc.index[v], j] = 1.0 if v == min(y.vertices) else -1.0
    return out


def oracle_signed(cc, w):
    L = np.zeros((cc.n_vertices, cc.n_vertices))
    for r in range(1, cc.max_rank + 1):
        d = dense_delta(cc, r)
        L += w[r] * d @ d.T
    return L


def oracle_dirichlet(cc, w):
    n = cc.n_vertices
    L = np.zeros((n, n))
    for r in range(1, cc.max_rank + 1):
        A = np.zeros((n, n))
        for y in cc.cells_of_rank(r):
            for u in y.vertices:
                for v in y.vertices:
                    if u != v:
                        A[cc.index[u], cc.index[v]] += 1
        L += w[r] * (np.diag(A.sum(axis=1)) - A)
    return L


def alternating_boundary(cc, k):
    """d_k(sigma) = sum_i (-1)^i sigma_{-i}, for simplicial complexes."""
    rows = {c.vertices: i for i, c in enumerate(cc.cells_of_rank(k - 1))}
    cols = cc.cells_of_rank(k)
    out = np.zeros((len(rows), len(cols)))
    for j, s in enumerate(cols):
        for i in range(len(s.vertices)):
            face = s.vertices[:i] + s.vertices[i + 1:]
            out[rows[face], j] = (-1) ** i
    return out


def alternating_hodge(cc, k):
    n_k = len(cc.cells_of_rank(k))
    out = np.zeros((n_k, n_k))
    if k + 1 <= cc.max_rank:
        up = alternating_boundary(cc, k + 1)
        out += up @ up.T
    if k >= 1:
        down = alternating_boundary(cc, k)
        out += down.T @ down
    return out


# -- incidence ---------------------------------------------------------------

def test_incidence_edge():
    d = incidence(from_graph([(1, 2)]), 1).toarray()
    np.testing.assert_array_equal(d, [[1.0], [-1.0]])


def test_incidence_rank4_cell():
    a = fig4_pair().left
    np.testing.assert_array_equal(incidence(a, 4).toarray(), [[1.0], [-1.0], [-1.0]])


def test_incidence_empty_rank():
    a = fig4_pair().left
    assert incidence(a, 2).shape == (3, 0)


def test_incidence_rank_out_of_range():
    a = fig4_pair().left
    with pytest.raises(RankOutOfRange):
        incidence(a, 5)
    with pytest.raises(RankOutOfRange):
        incidence(a, 0)


@given(complexes())
def test_incidence_sign_rule(cc):
    for k in range(1, cc.max_rank + 1):
        d = incidence(cc, k).toarray()
        assert np.array_equal(d, dense_delta(cc, k))
        for j in range(d.shape[1]):
            col = d[:, j]
            assert (col == 1).sum() == 1
            assert (col == -1).sum() == cc.cells_of_rank(k)[j].size - 1


# -- weights -----------------------------------------------------------------

def test_dyadic_weights():
    assert weight_scheme(1).weights == (1.0,)
    assert weight_scheme(4).weights == (1.0, 0.5, 0.25, 0.125)


def test_custom_weights_from_example_set():
    w = WeightScheme((0.5, 0.25, 0.125))
    assert w[3] == 0.125


def test_colliding_subset_sums_rejected():
    with pytest.raises(ValueError):
        WeightScheme((1.0, 0.5, 0.5))
    with pytest.raises(ValueError):
        WeightScheme((0.25, 0.75, 1.0))
    with pytest.raises(ValueError):
        WeightScheme((1.0, -0.5))


def test_unknown_scheme():
    with pytest.raises(UnknownScheme):
        weight_scheme(3, "harmonic")


@pytest.mark.parametrize("R", [1, 2, 5, 10, 20])
def test_dyadic_subset_sums_distinct(R):
    # exact rationals; 2**R subsets
    w = [Fraction(1, 2 ** (i - 1)) for i in range(1, R + 1)]
    assert [float(x) for x in w] == list(weight_scheme(R).weights)
    scaled = [int(x * 2 ** (R - 1)) for x in w]
    sums = {sum(b for b, bit in zip(scaled, range(R)) if mask >> bit & 1) for mask in range(2**R)}
    assert len(sums) == 2**R


# -- CC Laplacian ------------------------------------------------------------

@pytest.mark.parametrize("conv", ["signed", "dirichlet"])
def test_edge_laplacian(conv):
    np.testing.assert_array_equal(cc_laplacian(from_graph([(1, 2)]), convention=conv).matrix, EDGE_L)


def test_isolated_vertices_zero():
    cc = from_graph([], vertices=[1, 2, 3])
    np.testing.assert_array_equal(cc_laplacian(cc).matrix, np.zeros((3, 3)))


def test_fig4_signed_hand_expansion():
    a = fig4_pair().left
    expected = np.array([[1, -1, 0], [-1, 1, 0], [0, 0, 0]], float) + 0.125 * np.array(
        [[1, -1, -1], [-1, 1, 1], [-1, 1, 1]], float
    )
    np.testing.assert_array_equal(cc_laplacian(a, convention="signed").matrix, expected)


def test_fig4_dirichlet_hand_expansion():
    a, b = fig4_pair().left, fig4_pair().right
    # rank-4 cell {1,2,3}: every pair co-occurs once, degrees 2
    expected = np.array([[1, -1, 0], [-1, 1, 0], [0, 0, 0]], float) + 0.125 * np.array(
        [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], float
    )
    La = cc_laplacian(a, convention="dirichlet").matrix
    Lb = cc_laplacian(b, convention="dirichlet").matrix
    np.testing.assert_array_equal(La, expected)
    assert La[0, 2] - Lb[0, 2] == -0.125


def test_weight_length_mismatch():
    with pytest.raises(WeightLengthMismatch):
        cc_laplacian(fig4_pair().left, weight_scheme(2))


@pytest.mark.parametrize("conv", ["signed", "dirichlet"])
def test_kernel_matches_oracle(backend, conv):
    rng = np.random.default_rng(11)
    oracle = oracle_signed if conv == "signed" else oracle_dirichlet
    for _ in range(40):
        cc = random_complex(rng, int(rng.integers(1, 15)), max_rank=4, max_cell_size=6)
        w = weight_scheme(cc.max_rank)
        np.testing.assert_allclose(cc_laplacian(cc, w, conv).matrix, oracle(cc, w), atol=1e-14)


@given(st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_graph_reduction_exact(n, seed):
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u, v in combinations(range(n), 2) if rng.random() < 0.3]
    cc = from_graph(pairs, vertices=range(n))
    A = np.zeros((n, n))
    for u, v in pairs:
        A[u, v] = A[v, u] = 1
    DA = np.diag(A.sum(1)) - A
    for conv in ("signed", "dirichlet"):
        assert np.array_equal(cc_laplacian(cc, convention=conv).matrix, DA)


@given(complexes(max_vertices=10), st.integers(0, 2**32 - 1))
def test_conjugation_dirichlet(cc, seed):
    p = Permutation.random(cc.n_vertices, seed)
    P = p.matrix()
    L = cc_laplacian(cc, convention="dirichlet").matrix
    L2 = cc_laplacian(relabel(cc, p), convention="dirichlet").matrix
    assert np.array_equal(L2, P @ L @ P.T)


@given(complexes(max_vertices=10, max_cell_size=2), st.integers(0, 2**32 - 1))
def test_conjugation_signed_two_vertex_cells(cc, seed):
    p = Permutation.random(cc.n_vertices, seed)
    P = p.matrix()
    L = cc_laplacian(cc, convention="signed").matrix
    assert np.array_equal(cc_laplacian(relabel(cc, p), convention="signed").matrix, P @ L @ P.T)


def test_signed_convention_not_relabel_invariant():
    # the +1 moves with the smallest id, so swapping 1 and 3 changes the spectrum
    a = fig4_pair().left
    p = Permutation.from_vertex_map(a, {1: 3, 3: 1})
    ev1 = np.linalg.eigvalsh(cc_laplacian(a, convention="signed").matrix)
    ev2 = np.linalg.eigvalsh(cc_laplacian(relabel(a, p), convention="signed").matrix)
    assert np.max(np.abs(ev1 - ev2)) > 0.1


@given(complexes(max_vertices=10, max_cell_size=5), st.integers(0, 2**32 - 1))
def test_psd(cc, seed):
    rng = np.random.default_rng(seed)
    for conv in ("signed", "dirichlet"):
        L = cc_laplacian(cc, convention=conv).matrix
        assert np.array_equal(L, L.T)
        for _ in range(5):
            f = rng.normal(size=cc.n_vertices)
            assert f @ L @ f >= -1e-12


@given(complexes(max_vertices=10))
def test_dirichlet_rows_sum_to_zero(cc):
    L = cc_laplacian(cc, convention="dirichlet").matrix
    off = L - np.diag(np.diag(L))
    assert np.all(off <= 0)
    np.testing.assert_allclose(L.sum(axis=1), 0.0, atol=1e-12)


@given(complexes(max_vertices=10, max_cell_size=2))
def test_conventions_agree_on_two_vertex_cells(cc):
    assert np.array_equal(
        cc_laplacian(cc, convention="signed").matrix, cc_laplacian(cc, convention="dirichlet").matrix
    )


@given(complexes(max_vertices=12, max_cell_size=5))
def test_partial_sum_increment_bound(cc):
    # row-sum bound: a cell y adds at most 2(|y| - 1) to the absolute row sum of each of its vertices
    w = weight_scheme(cc.max_rank)
    for conv in ("signed", "dirichlet"):
        prev = np.zeros((cc.n_vertices, cc.n_vertices))
        for r in range(1, cc.max_rank + 1):
            cur = cc_laplacian(cc, w, conv, upto=r).matrix
            inc = np.abs(cur - prev).sum(axis=1).max()
            load = max(
                (sum(2 * (y.size - 1) for y in cc.cells_of_rank(r) if v in y.vertices) for v in cc.vertices), default=0
            )
            assert inc <= 2.0 ** (1 - r) * load + 1e-12
            prev = cur


def test_partial_sum_full_equals_default():
    a = fig4_pair().left
    assert np.array_equal(cc_laplacian(a, upto=4).matrix, cc_laplacian(a).matrix)
    assert np.array_equal(cc_laplacian(a, upto=1).matrix, cc_laplacian(fig4_pair().right, weight_scheme(1)).matrix)


# -- boundary / Hodge --------------------------------------------------------

def test_boundary_triangle():
    s = from_simplicial([{1, 2, 3}])
    d2 = boundary(s, 2).toarray()
    # rows {1,2},{1,3},{2,3}
    np.testing.assert_array_equal(d2[:, 0], [1.0, -1.0, 1.0])


def test_boundary_edge():
    np.testing.assert_array_equal(boundary(from_graph([(1, 2)]), 1).toarray(), [[1.0], [-1.0]])


def test_boundary_rank4_no_faces():
    a = fig4_pair().left
    assert boundary(a, 4).shape == (0, 1)


def test_boundary_out_of_range():
    with pytest.raises(RankOutOfRange):
        boundary(from_graph([(1, 2)]), 2)


@given(st.lists(st.sets(st.integers(0, 6), min_size=1, max_size=4), min_size=1, max_size=4))
def test_boundary_squares_to_zero_on_simplices(simplices):
    s = from_simplicial(simplices)
    for k in range(2, s.max_rank + 1):
        prod = boundary(s, k - 1).matrix @ boundary(s, k).matrix
        assert abs(prod).sum() == 0


@given(st.lists(st.sets(st.integers(0, 6), min_size=1, max_size=4), min_size=1, max_size=4))
def test_hodge_matches_alternating_signs(simplices):
    s = from_simplicial(simplices)
    for k in range(0, s.max_rank + 1):
        np.testing.assert_array_equal(hodge_laplacian(s, k), alternating_hodge(s, k))


def test_hodge_edge():
    np.testing.assert_array_equal(hodge_laplacian(from_graph([(1, 2)]), 0), EDGE_L)


def test_hodge_triangle_rank1():
    # filled triangle: up and down off-diagonals cancel
    np.testing.assert_array_equal(hodge_laplacian(from_simplicial([{1, 2, 3}]), 1), 3 * np.eye(3))


def test_hodge_fig4_identical():
    pair = fig4_pair()
    a, b = pair.left, pair.right
    for k in range(0, min(a.max_rank, b.max_rank) + 1):
        np.testing.assert_array_equal(hodge_laplacian(a, k), hodge_laplacian(b, k))
    for k in range(b.max_rank + 1, a.max_rank + 1):
        assert not np.any(hodge_laplacian(a, k))


def test_hodge_out_of_range():
    with pytest.raises(RankOutOfRange):
        hodge_laplacian(from_graph([(1, 2)]), 2)


@given(complexes(max_vertices=8, max_rank=2, max_cell_size=3), st.integers(0, 2**32 - 1))
def test_hodge_blind_to_isolated_rank(cc, seed):
    rng = np.random.default_rng(seed)
    if cc.n_vertices < 2:
        return
    # larger than any existing cell, so it cannot sit inside one; rank 5 has no rank-4/6 neighbours
    size = min(cc.n_vertices, 4)
    verts = tuple(sorted(rng.choice(cc.vertices, size=size, replace=False).tolist()))
    if any(set(verts) <= set(c.vertices) for c in cc.cells if c.size > 1):
        return
    big = build_complex(list(cc.cells) + [Cell(verts, 5)])
    for k in range(0, cc.max_rank + 1):
        np.testing.assert_array_equal(hodge_laplacian(big, k), hodge_laplacian(cc, k))
    L_small = cc_laplacian(cc, weight_scheme(cc.max_rank)).matrix
    assert not np.array_equal(cc_laplacian(big).matrix, L_small)
