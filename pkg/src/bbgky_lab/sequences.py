"""Finite sequences of permutation-symmetric labeled operators.

A sequence holds one component per particle number 0..n_max (component 0 is
a plain complex scalar); component n lives on labels (1, .., n). Components
above n_max are identically zero, which turns every series in the solution
theory into an exact finite sum at this scale.
"""

import itertools
from dataclasses import dataclass
from math import factorial

import numpy as np

from .operators import (ParticleOperator, embed, partial_trace, relabel,
                        slot_permute, tensor_product)

__all__ = [
    "OperatorSequence",
    "EstimateConstants",
    "exp_annihilation",
    "apply_creation",
    "cluster_expand",
    "cluster_invert",
    "pairing",
    "block_product",
    "placed_component",
    "symmetrize_component",
    "symmetry_defect",
]

SYMMETRY_TOL = 1e-10


def symmetrize_component(mat, n, d):
    """Group-average over label permutations (projects onto symmetric ops)."""
    if n <= 1:
        return np.asarray(mat, dtype=np.complex128)
    op = ParticleOperator(tuple(range(1, n + 1)), mat, d)
    acc = np.zeros_like(op.mat)
    perms = list(itertools.permutations(range(n)))
    for perm in perms:
        acc += slot_permute(op, perm).mat
    return acc / len(perms)


def symmetry_defect(op):
    """Largest deviation of the operator from label-permutation symmetry."""
    worst = 0.0
    for j in range(op.n - 1):
        perm = list(range(op.n))
        perm[j], perm[j + 1] = perm[j + 1], perm[j]
        worst = max(worst, float(np.max(np.abs(slot_permute(op, perm).mat - op.mat))))
    return worst


@dataclass(frozen=True)
class OperatorSequence:
    """Scalar 0-component plus one symmetric operator per particle number."""

    d: int
    n_max: int
    scalar: complex
    comps: tuple  # comps[i] is the (i+1)-particle component on labels 1..i+1

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if len(self.comps) != self.n_max:
            raise ValueError(f"expected {self.n_max} components, got {len(self.comps)}")
        for i, comp in enumerate(self.comps):
            want = tuple(range(1, i + 2))
            if comp.labels != want or comp.d != self.d:
                raise ValueError(f"component {i + 1} must live on labels {want}")
            defect = symmetry_defect(comp)
            if defect > SYMMETRY_TOL:
                raise ValueError(
                    f"component {i + 1} violates permutation symmetry by {defect:.2e}")

    @classmethod
    def from_matrices(cls, d, mats, scalar=0.0):
        comps = tuple(
            ParticleOperator(tuple(range(1, i + 2)), mat, d)
            for i, mat in enumerate(mats))
        return cls(d=d, n_max=len(comps), scalar=complex(scalar), comps=comps)

    @classmethod
    def zeros(cls, d, n_max, scalar=0.0):
        mats = [np.zeros((d ** (i + 1),) * 2) for i in range(n_max)]
        return cls.from_matrices(d, mats, scalar)

    def component(self, s):
        """Component on s particles; None above n_max (treated as zero)."""
        if s == 0:
            return self.scalar
        if 1 <= s <= self.n_max:
            return self.comps[s - 1]
        return None

    def replace(self, s, op):
        comps = list(self.comps)
        comps[s - 1] = op
        return OperatorSequence(self.d, self.n_max, self.scalar, tuple(comps))

    def with_scalar(self, scalar):
        return OperatorSequence(self.d, self.n_max, complex(scalar), self.comps)

    def norms(self):
        """Trace norm of each component 1..n_max."""
        from .operators import trace_norm
        return [trace_norm(c) for c in self.comps]

    def __add__(self, other):
        self._compatible(other)
        comps = tuple(a + b for a, b in zip(self.comps, other.comps))
        return OperatorSequence(self.d, self.n_max, self.scalar + other.scalar, comps)

    def __sub__(self, other):
        self._compatible(other)
        comps = tuple(a - b for a, b in zip(self.comps, other.comps))
        return OperatorSequence(self.d, self.n_max, self.scalar - other.scalar, comps)

    def _compatible(self, other):
        if self.d != other.d or self.n_max != other.n_max:
            raise ValueError("sequences have different shapes")


@dataclass(frozen=True)
class EstimateConstants:
    """Norm constants entering the solution estimates."""

    c: float        # largest initial component trace norm over the blocks used
    c_frak: float   # largest initial marginal-correlation trace norm

    def __post_init__(self):
        if self.c < 0 or self.c_frak < 0:
            raise ValueError("estimate constants must be nonnegative")


def placed_component(seq, block):
    """Sequence component |block| relabeled onto the sorted block labels."""
    comp = seq.component(len(block))
    if comp is None:
        return None
    return relabel(comp, tuple(sorted(block)))


def block_product(seq, blocks, labels=None):
    """Product of components placed on disjoint blocks, None if any vanishes
    (block larger than n_max)."""
    factors = []
    for block in blocks:
        comp = placed_component(seq, block)
        if comp is None:
            return None
        factors.append(comp)
    return tensor_product(factors, labels=labels)


def exp_annihilation(seq, sign=+1):
    """Componentwise sum of signed partial traces: out_s = sum over n of
    (sign)^n / n! Tr over labels s+1..s+n of component s+n."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    mats = []
    for s in range(1, seq.n_max + 1):
        acc = seq.comps[s - 1].mat.copy()
        for n in range(1, seq.n_max - s + 1):
            high = seq.comps[s + n - 1]
            traced = partial_trace(high, tuple(range(1, s + 1)))
            acc += (sign ** n / factorial(n)) * traced.mat
        mats.append(acc)
    scalar = complex(seq.scalar)
    for n in range(1, seq.n_max + 1):
        comp = seq.comps[n - 1]
        scalar += (sign ** n / factorial(n)) * comp.trace()
    return OperatorSequence.from_matrices(seq.d, mats, scalar)


def apply_creation(seq):
    """out_s = sum over positions j of component s-1 embedded with identity
    at slot j. The scalar component enters pairings only and is dropped."""
    mats = []
    for s in range(1, seq.n_max + 1):
        labels = tuple(range(1, s + 1))
        dim = seq.d ** s
        acc = np.zeros((dim, dim), dtype=np.complex128)
        if s >= 2:
            low = seq.comps[s - 2]
            for j in labels:
                rest = tuple(lab for lab in labels if lab != j)
                acc += embed(relabel(low, rest), labels).mat
        mats.append(acc)
    return OperatorSequence.from_matrices(seq.d, mats, 0.0)


def cluster_expand(seq):
    """out_s = sum over partitions of (1..s) of products of components."""
    from .partitions import partitions
    mats = []
    for s in range(1, seq.n_max + 1):
        labels = tuple(range(1, s + 1))
        acc = np.zeros((seq.d ** s,) * 2, dtype=np.complex128)
        for p in partitions(labels):
            term = block_product(seq, p.blocks, labels=labels)
            if term is not None:
                acc += term.mat
        mats.append(acc)
    return OperatorSequence.from_matrices(seq.d, mats, seq.scalar)


def cluster_invert(seq):
    """Inverse of cluster_expand: the same sum with partition-lattice
    coefficients (-1)**(|P|-1) (|P|-1)!."""
    from .partitions import moebius_coefficient, partitions
    mats = []
    for s in range(1, seq.n_max + 1):
        labels = tuple(range(1, s + 1))
        acc = np.zeros((seq.d ** s,) * 2, dtype=np.complex128)
        for p in partitions(labels):
            term = block_product(seq, p.blocks, labels=labels)
            if term is not None:
                acc += moebius_coefficient(p) * term.mat
        mats.append(acc)
    return OperatorSequence.from_matrices(seq.d, mats, seq.scalar)


def pairing(f_seq, g_seq):
    """Weighted trace pairing: sum over s of (1/s!) Tr f_s g_s, plus the
    scalar product of the 0-components."""
    f_seq._compatible(g_seq)
    total = complex(f_seq.scalar) * complex(g_seq.scalar)
    for s in range(1, f_seq.n_max + 1):
        total += np.trace(f_seq.comps[s - 1].mat @ g_seq.comps[s - 1].mat) / factorial(s)
    return complex(total)
