# Accelerated tensor-slot kernels. Same conventions as kernels._pure:
# slot j is the j-th tensor factor, most significant first.

import numpy as np

cimport numpy as cnp

cnp.import_array()

name = "accel"


cdef void _digit_offsets(long size, int d, long[:] weights, long[:] out) nogil:
    # out[m] = sum over digits of m (base d, most significant first) of
    # digit * weights[slot]; weights has one entry per local slot.
    cdef long m, rem
    cdef int nslots = weights.shape[0]
    cdef int j
    for m in range(size):
        rem = m
        out[m] = 0
        for j in range(nslots - 1, -1, -1):
            out[m] += (rem % d) * weights[j]
            rem //= d


def embed(cnp.ndarray[cnp.complex128_t, ndim=2] mat, pos, int n, int d):
    """Tensor `mat` (on slots `pos`) with identities on the remaining slots."""
    cdef int k = len(pos)
    if k == n:
        return np.ascontiguousarray(mat)
    cdef long dn = d ** n
    cdef long dk = d ** k
    cdef long dr = d ** (n - k)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((dn, dn), dtype=np.complex128)
    cdef long[:] full_w = np.array([d ** (n - 1 - j) for j in range(n)], dtype=np.int64)
    rest = [j for j in range(n) if j not in set(pos)]
    cdef long[:] w_pos = np.array([full_w[j] for j in pos], dtype=np.int64)
    cdef long[:] w_rest = np.array([full_w[j] for j in rest], dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off_pos = np.empty(dk, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off_rest = np.empty(dr, dtype=np.int64)
    _digit_offsets(dk, d, w_pos, off_pos)
    _digit_offsets(dr, d, w_rest, off_rest)
    cdef long rs, cs, m, r, c
    cdef double complex v
    cdef cnp.complex128_t[:, :] mv = mat
    cdef cnp.complex128_t[:, :] ov = out
    cdef cnp.int64_t[:] op = off_pos
    cdef cnp.int64_t[:] orr = off_rest
    with nogil:
        for rs in range(dk):
            for cs in range(dk):
                v = mv[rs, cs]
                if v == 0:
                    continue
                r = op[rs]
                c = op[cs]
                for m in range(dr):
                    ov[r + orr[m], c + orr[m]] = v
    return out


def ptrace(cnp.ndarray[cnp.complex128_t, ndim=2] mat, keep, int n, int d):
    """Partial trace keeping slots `keep`, tracing out the rest."""
    cdef int k = len(keep)
    if k == n:
        return np.ascontiguousarray(mat)
    cdef long dk = d ** k
    cdef long dr = d ** (n - k)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.zeros((dk, dk), dtype=np.complex128)
    cdef long[:] full_w = np.array([d ** (n - 1 - j) for j in range(n)], dtype=np.int64)
    rest = [j for j in range(n) if j not in set(keep)]
    cdef long[:] w_keep = np.array([full_w[j] for j in keep], dtype=np.int64)
    cdef long[:] w_rest = np.array([full_w[j] for j in rest], dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off_keep = np.empty(dk, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] off_rest = np.empty(dr, dtype=np.int64)
    _digit_offsets(dk, d, w_keep, off_keep)
    _digit_offsets(dr, d, w_rest, off_rest)
    cdef long rs, cs, m
    cdef double complex acc
    cdef cnp.complex128_t[:, :] mv = mat
    cdef cnp.complex128_t[:, :] ov = out
    cdef cnp.int64_t[:] ok = off_keep
    cdef cnp.int64_t[:] orr = off_rest
    with nogil:
        for rs in range(dk):
            for cs in range(dk):
                acc = 0
                for m in range(dr):
                    acc += mv[ok[rs] + orr[m], ok[cs] + orr[m]]
                ov[rs, cs] = acc
    return out


def permute(cnp.ndarray[cnp.complex128_t, ndim=2] mat, perm, int n, int d):
    """Relocate slots: slot j of the output is slot perm[j] of the input."""
    cdef long dn = d ** n
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out = np.empty((dn, dn), dtype=np.complex128)
    # row index map: out index -> input index
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.empty(dn, dtype=np.int64)
    cdef long[:] full_w = np.array([d ** (n - 1 - j) for j in range(n)], dtype=np.int64)
    cdef long[:] w = np.array([full_w[p] for p in perm], dtype=np.int64)
    _digit_offsets(dn, d, w, idx)
    cdef long r, c
    cdef cnp.complex128_t[:, :] mv = mat
    cdef cnp.complex128_t[:, :] ov = out
    cdef cnp.int64_t[:] iv = idx
    with nogil:
        for r in range(dn):
            for c in range(dn):
                ov[r, c] = mv[iv[r], iv[c]]
    return out
