"""Hamiltonians, commutator generators, unitary groups, scattering operators.

A ``System`` bundles the one-body matrix K, the two-body matrix Phi (plus
optional higher-arity potentials) and hbar, and owns the propagator caches.
Identical particles make every n-particle Hamiltonian depend only on n, so
propagators are cached per (particle count, time) and their embeddings per
(slot positions, total count, time). Cache inserts are idempotent, so
concurrent readers/writers are harmless.
"""

import itertools

import numpy as np

from . import kernels
from .operators import ParticleOperator, unitary_propagator

__all__ = ["System", "build_hamiltonian", "evolve_group", "liouvillian",
           "scattering_operator"]

_SWAP_TOL = 1e-12


def _check_hermitian(mat, name, tol=1e-12):
    if np.max(np.abs(mat - mat.conj().T)) > tol:
        raise ValueError(f"{name} must be Hermitian within {tol}")


def _check_swap_symmetric(phi, d, name):
    swapped = kernels.permute(phi, (1, 0), 2, d)
    if np.max(np.abs(phi - swapped)) > _SWAP_TOL:
        raise ValueError(f"{name} must be symmetric under the factor swap")


class System:
    """Finite qudit system with pairwise (and optional k-body) interactions."""

    def __init__(self, d, kinetic, potential=None, hbar=1.0, k_body=None):
        self.d = int(d)
        if self.d < 2:
            raise ValueError("per-particle dimension must be at least 2")
        if hbar <= 0:
            raise ValueError("hbar must be positive")
        self.hbar = float(hbar)
        self.kinetic = np.asarray(kinetic, dtype=np.complex128)
        if self.kinetic.shape != (self.d, self.d):
            raise ValueError(f"kinetic matrix must be {self.d}x{self.d}")
        _check_hermitian(self.kinetic, "kinetic")
        if potential is None:
            potential = np.zeros((self.d ** 2, self.d ** 2))
        self.potential = np.asarray(potential, dtype=np.complex128)
        if self.potential.shape != (self.d ** 2, self.d ** 2):
            raise ValueError(f"potential matrix must be {self.d**2}x{self.d**2}")
        _check_hermitian(self.potential, "potential")
        _check_swap_symmetric(self.potential, self.d, "potential")
        self.k_body = {}
        for k, mat in (k_body or {}).items():
            k = int(k)
            mat = np.asarray(mat, dtype=np.complex128)
            if mat.shape != (self.d ** k,) * 2:
                raise ValueError(f"{k}-body potential must be {self.d**k} square")
            _check_hermitian(mat, f"{k}-body potential")
            self.k_body[k] = mat
        self._hamiltonians = {}
        self._eigs = {}
        self._propagators = {}
        self._embedded_unitaries = {}
        self._scattering = {}

    # -- Hamiltonians -----------------------------------------------------

    def hamiltonian_matrix(self, n):
        """Matrix of the n-particle Hamiltonian (one per particle count)."""
        cached = self._hamiltonians.get(n)
        if cached is not None:
            return cached
        dim = self.d ** n
        H = np.zeros((dim, dim), dtype=np.complex128)
        for i in range(n):
            H += kernels.embed(self.kinetic, (i,), n, self.d)
        if n >= 2:
            for i, j in itertools.combinations(range(n), 2):
                H += kernels.embed(self.potential, (i, j), n, self.d)
        for k, mat in self.k_body.items():
            if n >= k:
                for subset in itertools.combinations(range(n), k):
                    H += kernels.embed(mat, subset, n, self.d)
        self._hamiltonians[n] = H
        return H

    def hamiltonian(self, labels):
        labels = tuple(sorted(labels))
        if not labels:
            raise ValueError("need at least one label")
        return ParticleOperator(labels, self.hamiltonian_matrix(len(labels)), self.d)

    # -- propagators -------------------------------------------------------

    def _eigh(self, n):
        cached = self._eigs.get(n)
        if cached is None:
            cached = np.linalg.eigh(self.hamiltonian_matrix(n))
            self._eigs[n] = cached
        return cached

    def propagator(self, n, t):
        """Unitary exp(-i t H_n / hbar), cached per (n, t)."""
        key = (n, float(t))
        cached = self._propagators.get(key)
        if cached is None:
            energies, vecs = self._eigh(n)
            phases = np.exp(-1j * float(t) / self.hbar * energies)
            cached = (vecs * phases) @ vecs.conj().T
            self._propagators[key] = cached
        return cached

    def embedded_propagator(self, pos, n, t):
        """Propagator of len(pos) particles embedded at slots ``pos`` of n."""
        key = (tuple(pos), n, float(t))
        cached = self._embedded_unitaries.get(key)
        if cached is None:
            U = self.propagator(len(pos), t)
            cached = kernels.embed(U, tuple(pos), n, self.d) if len(pos) != n else U
            self._embedded_unitaries[key] = cached
        return cached

    def scattering_matrix(self, n, t):
        """Matrix implementing the interacting group composed with inverse
        free one-particle groups: conjugation by U_n(t) (U_1(-t))**n."""
        key = (n, float(t))
        cached = self._scattering.get(key)
        if cached is None:
            U = self.propagator(n, t)
            u1_back = unitary_propagator(self.kinetic, -t, self.hbar)
            B = u1_back
            for _ in range(n - 1):
                B = np.kron(B, u1_back)
            cached = U @ B
            self._scattering[n, float(t)] = cached
        return cached

    # -- groups as superoperators -------------------------------------------

    def evolve(self, op, t):
        """Conjugation group: exp(-itH/hbar) op exp(+itH/hbar)."""
        U = self.propagator(op.n, t)
        return op.with_matrix(U @ op.mat @ U.conj().T)

    def evolve_subset(self, op, labels, t):
        """Apply the group of ``labels`` only, identity on the other factors."""
        labels = tuple(sorted(labels))
        pos = tuple(op.labels.index(lab) for lab in labels)
        U = self.embedded_propagator(pos, op.n, t)
        return op.with_matrix(U @ op.mat @ U.conj().T)

    def scatter(self, op, t):
        W = self.scattering_matrix(op.n, t)
        return op.with_matrix(W @ op.mat @ W.conj().T)

    def scatter_subset(self, op, labels, t):
        labels = tuple(sorted(labels))
        pos = tuple(op.labels.index(lab) for lab in labels)
        W = self.scattering_matrix(len(labels), t)
        if len(labels) != op.n:
            W = kernels.embed(W, pos, op.n, self.d)
        return op.with_matrix(W @ op.mat @ W.conj().T)

    # -- commutator generators ----------------------------------------------

    def commutator_generator(self, op, generator_mat, labels=None):
        """(-i/hbar) [G, op] with G given on ``labels`` (default: all of op)."""
        if labels is None or tuple(sorted(labels)) == op.labels:
            G = generator_mat
        else:
            pos = tuple(op.labels.index(lab) for lab in sorted(labels))
            G = kernels.embed(generator_mat, pos, op.n, self.d)
        mat = (-1j / self.hbar) * (G @ op.mat - op.mat @ G)
        return op.with_matrix(mat)

    def liouville(self, op):
        """Full von Neumann generator on the operator's label set."""
        return self.commutator_generator(op, self.hamiltonian_matrix(op.n))

    def free_liouville(self, op, label):
        """One-body generator of the given particle."""
        return self.commutator_generator(op, self.kinetic, labels=(label,))

    def interaction_liouville(self, op, pair):
        """Two-body interaction generator of the labeled pair."""
        i1, i2 = pair
        if i1 == i2:
            raise ValueError("interaction needs two distinct labels")
        return self.commutator_generator(op, self.potential, labels=(i1, i2))

    def k_body_liouville(self, op, labels):
        """k-body interaction generator (k taken from len(labels))."""
        k = len(labels)
        if k == 2:
            return self.interaction_liouville(op, tuple(labels))
        if k not in self.k_body:
            raise ValueError(f"no {k}-body potential configured")
        return self.commutator_generator(op, self.k_body[k], labels=tuple(labels))

    def scattering_generator(self, op):
        """Sum of interaction generators over all label subsets of size >= 2."""
        out = np.zeros_like(op.mat)
        arities = {2} | set(self.k_body)
        for k in sorted(arities):
            if k > op.n:
                continue
            for subset in itertools.combinations(op.labels, k):
                out += self.k_body_liouville(op, subset).mat
        return op.with_matrix(out)


# -- module-level operation surface ------------------------------------------

def build_hamiltonian(system, labels):
    """Hermitian n-particle Hamiltonian on the given labels."""
    return system.hamiltonian(labels)


def evolve_group(system, op, t):
    """Unitary-conjugation group generated by the von Neumann equation."""
    return system.evolve(op, t)


def liouvillian(system, op, mode="full", labels=None):
    """Commutator generator; ``mode`` is 'full', 'interaction' or 'interaction_k'.

    For the interaction modes, ``labels`` names the particles the potential
    acts on (two for 'interaction', the potential arity for 'interaction_k').
    """
    if mode == "full":
        return system.liouville(op)
    if mode == "interaction":
        return system.interaction_liouville(op, tuple(labels))
    if mode == "interaction_k":
        return system.k_body_liouville(op, tuple(labels))
    raise ValueError(f"unknown liouvillian mode: {mode!r}")


def scattering_operator(system, op, t):
    """Interacting group composed with inverse free one-particle groups."""
    return system.scatter(op, t)
