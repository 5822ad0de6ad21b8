"""Pure-numpy tensor-slot kernels.

Conventions shared with the accelerated backend:

* an operator on ``n`` qudit slots of local dimension ``d`` is a dense
  ``(d**n, d**n)`` complex matrix;
* slot ``j`` is the ``j``-th tensor factor, most significant first, so the
  row index decomposes as ``sum(digit[j] * d**(n-1-j))``.
"""

import numpy as np

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"

name = "pure"


def embed(mat, pos, n, d):
    """Tensor ``mat`` (living on slots ``pos``) with identities on the rest.

    ``pos`` must be a sorted tuple of distinct slot indices in ``range(n)``.
    Returns the ``(d**n, d**n)`` matrix acting as ``mat`` on ``pos`` and as
    the identity elsewhere.
    """
    k = len(pos)
    if k == n:
        return np.ascontiguousarray(mat)
    big = np.kron(mat, np.eye(d ** (n - k), dtype=mat.dtype))
    # kron placed the source on slots 0..k-1; route slot i of `big` to its
    # final location so that source slots land on `pos`.
    final = list(pos) + [j for j in range(n) if j not in pos]
    perm = [0] * n
    for i, j in enumerate(final):
        perm[j] = i
    return permute(big, tuple(perm), n, d)


def ptrace(mat, keep, n, d):
    """Partial trace keeping slots ``keep`` (sorted tuple), tracing the rest."""
    k = len(keep)
    if k == n:
        return np.ascontiguousarray(mat)
    traced = [j for j in range(n) if j not in keep]
    row = list(_LETTERS[:n])
    col = list(_LETTERS[n:2 * n])
    for j in traced:
        col[j] = row[j]
    out = "".join(row[j] for j in keep) + "".join(col[j] for j in keep)
    spec = "".join(row) + "".join(col) + "->" + out
    t = mat.reshape((d,) * (2 * n))
    return np.einsum(spec, t).reshape(d ** k, d ** k)


def permute(mat, perm, n, d):
    """Relocate slots: slot ``j`` of the output is slot ``perm[j]`` of the input."""
    axes = list(perm) + [p + n for p in perm]
    t = mat.reshape((d,) * (2 * n))
    return np.ascontiguousarray(t.transpose(axes)).reshape(d ** n, d ** n)
