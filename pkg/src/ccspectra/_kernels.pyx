# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same signatures and semantics as ``_fallback``."""
import numpy as np

cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


def signed_gram(Py_ssize_t n, const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                const double[::1] weights):
    cdef double[:, ::1] out = np.zeros((n, n))
    cdef Py_ssize_t c, p, q, a, b, start, stop
    cdef double w, sa, sb
    with nogil:
        for c in range(indptr.shape[0] - 1):
            start = indptr[c]
            stop = indptr[c + 1]
            w = weights[c]
            for p in range(start, stop):
                a = indices[p]
                sa = 1.0 if p == start else -1.0
                for q in range(start, stop):
                    b = indices[q]
                    sb = 1.0 if q == start else -1.0
                    out[a, b] += w * sa * sb
    return np.asarray(out)


def comember_laplacian(Py_ssize_t n, const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                       const double[::1] weights):
    cdef double[:, ::1] out = np.zeros((n, n))
    cdef Py_ssize_t c, p, q, a, start, stop, size
    cdef double w
    with nogil:
        for c in range(indptr.shape[0] - 1):
            start = indptr[c]
            stop = indptr[c + 1]
            size = stop - start
            if size < 2:
                continue
            w = weights[c]
            for p in range(start, stop):
                a = indices[p]
                out[a, a] += w * (size - 1)
                for q in range(start, stop):
                    if q != p:
                        out[a, indices[q]] -= w
    return np.asarray(out)


def pair_energy(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                const double[::1] weights, const double[::1] f):
    cdef double total = 0.0, acc, d
    cdef Py_ssize_t c, p, q, start, stop
    with nogil:
        for c in range(indptr.shape[0] - 1):
            start = indptr[c]
            stop = indptr[c + 1]
            acc = 0.0
            for p in range(start, stop):
                for q in range(p + 1, stop):
                    d = f[indices[p]] - f[indices[q]]
                    acc += d * d
            total += weights[c] * acc
    return total


cdef inline cnp.int64_t _image(cnp.int64_t mask, const cnp.int64_t* perm) noexcept nogil:
    cdef cnp.int64_t img = 0
    cdef int bit = 0
    while mask:
        if mask & 1:
            img |= (<cnp.int64_t>1) << perm[bit]
        mask >>= 1
        bit += 1
    return img


def iso_search(Py_ssize_t n, const unsigned char[:, ::1] compat, const cnp.int64_t[::1] starts,
               const cnp.int64_t[::1] masks, const cnp.int64_t[::1] ranks,
               const unsigned char[::1] table):
    cdef cnp.int64_t* perm = <cnp.int64_t*> malloc(max(n, 1) * sizeof(cnp.int64_t))
    cdef cnp.int64_t* nxt = <cnp.int64_t*> malloc((n + 1) * sizeof(cnp.int64_t))
    cdef unsigned char* used = <unsigned char*> malloc(max(n, 1) * sizeof(unsigned char))
    cdef Py_ssize_t depth, j, c, i
    cdef bint ok, found = False
    if perm == NULL or nxt == NULL or used == NULL:
        free(perm); free(nxt); free(used)
        raise MemoryError()
    try:
        with nogil:
            for i in range(n):
                perm[i] = -1
                used[i] = 0
            depth = 0
            nxt[0] = 0
            while depth >= 0:
                if depth == n:
                    found = True
                    break
                j = nxt[depth]
                while j < n and (used[j] or not compat[depth, j]):
                    j += 1
                if j >= n:
                    depth -= 1
                    if depth >= 0:
                        used[perm[depth]] = 0
                        perm[depth] = -1
                    continue
                nxt[depth] = j + 1
                perm[depth] = j
                ok = True
                for c in range(starts[depth], starts[depth + 1]):
                    if not table[(ranks[c] << n) | _image(masks[c], perm)]:
                        ok = False
                        break
                if ok:
                    used[j] = 1
                    depth += 1
                    nxt[depth] = 0
                else:
                    perm[depth] = -1
        if found:
            return np.array([perm[i] for i in range(n)], dtype=np.int64)
        return None
    finally:
        free(perm)
        free(nxt)
        free(used)
