"""Pure-Python/numpy implementations of the hot kernels.

Signatures mirror ``_kernels.pyx`` exactly. Cells arrive in CSR form:
cell ``c`` covers ``indices[indptr[c]:indptr[c + 1]]`` (ascending vertex
positions) and carries weight ``weights[c]``.
"""
import numpy as np


def _size_groups(indptr, indices):
    sizes = np.diff(indptr)
    for s in np.unique(sizes):
        sel = np.flatnonzero(sizes == s)
        # gather the index blocks of all cells of this size as an (m, s) array
        rows = indices[indptr[sel][:, None] + np.arange(s)[None, :]]
        yield int(s), sel, rows


def signed_gram(n, indptr, indices, weights):
    """``sum_c w_c s_c s_c^T`` with ``s_c`` = +1 on the first vertex of ``c``, -1 on the rest."""
    out = np.zeros((n, n))
    for s, sel, rows in _size_groups(indptr, indices):
        sign = -np.ones(s)
        sign[0] = 1.0
        block = weights[sel][:, None, None] * np.outer(sign, sign)[None, :, :]
        np.add.at(out, (rows[:, :, None], rows[:, None, :]), block)
    return out


def comember_laplacian(n, indptr, indices, weights):
    """``sum_c w_c (D_c - A_c)`` where ``A_c`` links every pair of distinct vertices of ``c``."""
    out = np.zeros((n, n))
    for s, sel, rows in _size_groups(indptr, indices):
        if s < 2:
            continue
        block = -np.ones((s, s))
        np.fill_diagonal(block, s - 1)
        np.add.at(out, (rows[:, :, None], rows[:, None, :]), weights[sel][:, None, None] * block[None])
    return out


def pair_energy(indptr, indices, weights, f):
    """``sum_c w_c sum_{a<b in c} (f_a - f_b)^2`` by explicit pairwise differences."""
    total = 0.0
    for s, sel, rows in _size_groups(indptr, indices):
        if s < 2:
            continue
        vals = f[rows]
        iu, ju = np.triu_indices(s, k=1)
        diffs = vals[:, iu] - vals[:, ju]
        total += float(np.sum(weights[sel] * np.sum(diffs * diffs, axis=1)))
    return total


def iso_search(n, compat, starts, masks, ranks, table):
    """Backtracking search for a vertex bijection.

    Position ``d`` of complex A is assigned at depth ``d``; the cells listed
    in ``masks[starts[d]:starts[d+1]]`` (bitmasks over A positions whose
    highest set bit is ``d``) must map into B's cell table once ``d`` is
    placed. ``table[rank << n | mask]`` is nonzero iff B has that cell.
    Returns the image array or ``None``.
    """
    compat = np.asarray(compat, dtype=bool).tolist()
    table = bytes(np.asarray(table, dtype=np.uint8))
    starts = [int(s) for s in starts]
    masks = [int(m) for m in masks]
    ranks = [int(r) for r in ranks]
    perm = [-1] * n
    used = [False] * n
    stride_shift = n

    def image(mask):
        img = 0
        bit = 0
        while mask:
            if mask & 1:
                img |= 1 << perm[bit]
            mask >>= 1
            bit += 1
        return img

    def place(depth):
        if depth == n:
            return True
        for j in range(n):
            if used[j] or not compat[depth][j]:
                continue
            perm[depth] = j
            ok = True
            for c in range(starts[depth], starts[depth + 1]):
                if not table[(ranks[c] << stride_shift) | image(masks[c])]:
                    ok = False
                    break
            if ok:
                used[j] = True
                if place(depth + 1):
                    return True
                used[j] = False
            perm[depth] = -1
        return False

    if place(0):
        return np.array(perm, dtype=np.int64)
    return None
