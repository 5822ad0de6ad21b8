"""Labeled operators on finite tensor products of qudit spaces.

A ParticleOperator is a dense complex matrix on ``d**k`` dimensions together
with the ordered tuple of particle labels it acts on. Labels are kept
strictly increasing; slot ``j`` of the matrix is the ``j``-th smallest label.
"""

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from . import kernels

__all__ = [
    "ParticleOperator",
    "embed",
    "partial_trace",
    "trace_norm",
    "unitary_propagator",
    "symmetrize",
    "symmetrizer_matrix",
    "permutation_matrix",
    "slot_permute",
    "tensor_product",
    "relabel",
    "HERMITIAN_TOL",
    "UNITARY_TOL",
]

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class ParticleOperator:
    """Complex square matrix on the tensor factors named by ``labels``."""

    labels: tuple
    mat: np.ndarray
    d: int

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if any(x <= 0 for x in labels):
            raise ValueError(f"labels must be positive integers: {labels}")
        if list(labels) != sorted(set(labels)):
            raise ValueError(f"labels must be strictly increasing: {labels}")
        mat = np.asarray(self.mat, dtype=np.complex128)
        dim = self.d ** len(labels)
        if mat.shape != (dim, dim):
            raise ValueError(
                f"matrix shape {mat.shape} does not match d**{len(labels)} = {dim}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "mat", mat)

    @property
    def n(self):
        return len(self.labels)

    def trace(self):
        return complex(np.trace(self.mat))

    def is_hermitian(self, tol=HERMITIAN_TOL):
        return np.max(np.abs(self.mat - self.mat.conj().T)) <= tol

    def with_matrix(self, mat):
        return ParticleOperator(self.labels, mat, self.d)

    def __add__(self, other):
        self._check_same(other)
        return self.with_matrix(self.mat + other.mat)

    def __sub__(self, other):
        self._check_same(other)
        return self.with_matrix(self.mat - other.mat)

    def __mul__(self, scalar):
        return self.with_matrix(self.mat * scalar)

    __rmul__ = __mul__

    def _check_same(self, other):
        if self.labels != other.labels or self.d != other.d:
            raise ValueError("operators live on different label sets")


def _positions(sub, full):
    """Slot positions of the labels ``sub`` inside the sorted tuple ``full``."""
    index = {lab: i for i, lab in enumerate(full)}
    try:
        return tuple(index[lab] for lab in sub)
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]} not contained in {full}") from None


def embed(op, target):
    """Extend ``op`` by identity factors onto the label set ``target``.

    Factors are permuted into canonical (ascending-label) order; the trace
    picks up one factor of ``d`` per added label.
    """
    target = tuple(sorted(target))
    if not set(op.labels) <= set(target):
        raise ValueError(f"labels {op.labels} not contained in target {target}")
    if op.labels == target:
        return op
    pos = _positions(op.labels, target)
    mat = kernels.embed(op.mat, pos, len(target), op.d)
    return ParticleOperator(target, mat, op.d)


def partial_trace(op, keep):
    """Trace out every factor of ``op`` whose label is not in ``keep``."""
    keep = tuple(sorted(keep))
    if not set(keep) <= set(op.labels):
        raise ValueError(f"keep set {keep} not contained in labels {op.labels}")
    if keep == op.labels:
        return op
    pos = _positions(keep, op.labels)
    mat = kernels.ptrace(op.mat, pos, op.n, op.d)
    return ParticleOperator(keep, mat, op.d)


def relabel(op, new_labels):
    """Move ``op`` onto a new label tuple of the same size (slots in order)."""
    new_labels = tuple(sorted(new_labels))
    if len(new_labels) != op.n:
        raise ValueError("relabel needs the same number of labels")
    return ParticleOperator(new_labels, op.mat, op.d)


def tensor_product(ops, labels=None):
    """Product of operators on pairwise disjoint label sets.

    The factors commute, so this is the joint tensor operator arranged on the
    union of their labels (or on ``labels``, which must contain that union).
    """
    ops = list(ops)
    if not ops:
        raise ValueError("need at least one factor")
    union = []
    for op in ops:
        union.extend(op.labels)
    if len(set(union)) != len(union):
        raise ValueError("tensor factors must live on disjoint labels")
    full = tuple(sorted(union if labels is None else labels))
    out = embed(ops[0], full)
    mat = out.mat
    for op in ops[1:]:
        mat = mat @ embed(op, full).mat
    return ParticleOperator(full, mat, ops[0].d)


def trace_norm(op):
    """Sum of singular values of the matrix."""
    mat = op.mat if isinstance(op, ParticleOperator) else np.asarray(op)
    return float(np.linalg.svd(mat, compute_uv=False).sum())


def unitary_propagator(H, t, hbar=1.0):
    """Unitary exp(-i t H / hbar) of a Hermitian generator.

    Computed from the eigendecomposition of ``H``, which keeps the result
    unitary to rounding accuracy.
    """
    if isinstance(H, ParticleOperator):
        if not H.is_hermitian(UNITARY_TOL):
            raise ValueError("propagator generator must be Hermitian")
        return H.with_matrix(_propagator_matrix(H.mat, t, hbar))
    H = np.asarray(H, dtype=np.complex128)
    if np.max(np.abs(H - H.conj().T)) > UNITARY_TOL:
        raise ValueError("propagator generator must be Hermitian")
    return _propagator_matrix(H, t, hbar)


def _propagator_matrix(H, t, hbar):
    energies, vecs = np.linalg.eigh(H)
    phases = np.exp(-1j * t / hbar * energies)
    return (vecs * phases) @ vecs.conj().T


def permutation_matrix(perm, d):
    """Matrix of the slot permutation |i_0 .. i_{n-1}> -> reordered kets.

    ``perm`` maps target slot -> source slot: column index slots are routed
    so that ``P @ vec`` has slot ``j`` equal to slot ``perm[j]`` of ``vec``.
    """
    n = len(perm)
    dim = d ** n
    P = np.zeros((dim, dim))
    weights = [d ** (n - 1 - j) for j in range(n)]
    for src in range(dim):
        digits = []
        rem = src
        for j in range(n):
            digits.append(rem // weights[j])
            rem %= weights[j]
        dst = sum(digits[perm[j]] * weights[j] for j in range(n))
        P[dst, src] = 1.0
    return P


def _permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def symmetrizer_matrix(n, d, sign=+1):
    """Projector (1/n!) sum over permutations of (sign)^parity * P_pi."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    dim = d ** n
    S = np.zeros((dim, dim))
    for perm in itertools.permutations(range(n)):
        coeff = 1 if sign == +1 else _permutation_sign(perm)
        S += coeff * permutation_matrix(perm, d)
    return S / factorial(n)


def symmetrize(op, sign=+1):
    """Sandwich ``op`` between (anti)symmetrizer projectors."""
    S = symmetrizer_matrix(op.n, op.d, sign)
    return op.with_matrix(S @ op.mat @ S)


def slot_permute(op, perm):
    """Operator with tensor slots rearranged: out slot j = in slot perm[j]."""
    mat = kernels.permute(op.mat, tuple(perm), op.n, op.d)
    return op.with_matrix(mat)
