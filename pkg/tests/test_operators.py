import itertools

import numpy as np
import pytest

from bbgky_lab.operators import (ParticleOperator, embed, partial_trace,
                                 permutation_matrix, relabel, slot_permute,
                                 symmetrize, symmetrizer_matrix, tensor_product,
                                 trace_norm, unitary_propagator)
from conftest import random_labeled


def ptrace_oracle(mat, keep_pos, n, d):
    """Oracle: elementwise index-sum partial trace."""
    k = len(keep_pos)
    traced = [j for j in range(n) if j not in keep_pos]
    out = np.zeros((d ** k, d ** k), dtype=complex)
    for row in itertools.product(range(d), repeat=n):
        for col in itertools.product(range(d), repeat=n):
            if any(row[j] != col[j] for j in traced):
                continue
            r_full = sum(row[j] * d ** (n - 1 - j) for j in range(n))
            c_full = sum(col[j] * d ** (n - 1 - j) for j in range(n))
            r_keep = sum(row[j] * d ** (k - 1 - i)
                         for i, j in enumerate(keep_pos))
            c_keep = sum(col[j] * d ** (k - 1 - i)
                         for i, j in enumerate(keep_pos))
            out[r_keep, c_keep] += mat[r_full, c_full]
    return out


def singular_value_norm_oracle(mat):
    """Oracle: trace norm as the trace of sqrt(A^H A) via eigenvalues."""
    eigs = np.linalg.eigvalsh(mat.conj().T @ mat)
    return float(np.sqrt(np.clip(eigs, 0, None)).sum())


def test_embed_trace_scaling(rng):
    f = random_labeled(rng, 2, (2,))
    big = embed(f, (1, 2))
    assert abs(big.trace() - 2 * f.trace()) < 1e-12
    assert embed(f, (2,)) is f


def test_embed_error_outside_target(rng):
    f = random_labeled(rng, 2, (2,))
    with pytest.raises(ValueError):
        embed(f, (1, 3))


def test_embed_then_trace_roundtrip(rng):
    for d in (2, 3):
        f = random_labeled(rng, d, (1,), hermitian=False)
        big = embed(f, (1, 2))
        back = partial_trace(big, (1,))
        assert np.allclose(back.mat, d * f.mat, atol=1e-12)


def test_partial_trace_against_index_oracle(rng):
    for d, labels, keep in [(2, (1, 2), (1,)), (2, (1, 2, 3), (1, 3)),
                            (3, (1, 2), (2,))]:
        op = random_labeled(rng, d, labels, hermitian=False)
        keep_pos = tuple(labels.index(k) for k in keep)
        want = ptrace_oracle(op.mat, keep_pos, len(labels), d)
        got = partial_trace(op, keep)
        assert np.allclose(got.mat, want, atol=1e-13)


def test_partial_trace_of_product_factorizes(rng):
    a = random_labeled(rng, 2, (1,), hermitian=False)
    b = random_labeled(rng, 2, (2,), hermitian=False)
    prod = tensor_product([a, b])
    got = partial_trace(prod, (1,))
    assert np.allclose(got.mat, b.trace() * a.mat, atol=1e-13)


def test_trace_preserved_under_partial_trace(rng):
    for _ in range(100):
        op = random_labeled(rng, 2, (1, 2, 3), hermitian=False)
        got = partial_trace(op, (2,))
        assert abs(got.trace() - op.trace()) < 1e-12


def test_partial_trace_identity_case(rng):
    op = random_labeled(rng, 2, (1, 2))
    assert partial_trace(op, (1, 2)) is op
    with pytest.raises(ValueError):
        partial_trace(op, (3,))


def test_trace_norm_values(rng):
    eye = ParticleOperator((1,), np.eye(2), 2)
    assert trace_norm(eye) == pytest.approx(2.0, abs=1e-14)
    h = random_labeled(rng, 2, (1, 2))
    assert trace_norm(h) == pytest.approx(
        float(np.abs(np.linalg.eigvalsh(h.mat)).sum()), abs=1e-12)
    # unitary invariance against the singular-value oracle
    g = random_labeled(rng, 2, (1, 2), hermitian=False)
    U = unitary_propagator(random_labeled(rng, 2, (1, 2)), 0.7).mat
    assert trace_norm(ParticleOperator((1, 2), U @ g.mat @ U.conj().T, 2)) == \
        pytest.approx(singular_value_norm_oracle(g.mat), abs=1e-10)


def test_unitary_propagator_basics(rng):
    H = random_labeled(rng, 2, (1, 2))
    U0 = unitary_propagator(H, 0.0)
    assert np.allclose(U0.mat, np.eye(4), atol=1e-14)
    diag = ParticleOperator((1,), np.diag([1.0, -2.0]), 2)
    U = unitary_propagator(diag, 0.5, hbar=1.0)
    assert np.allclose(U.mat, np.diag(np.exp(-0.5j * np.array([1.0, -2.0]))),
                       atol=1e-14)


def test_unitary_propagator_group_law(rng):
    H = random_labeled(rng, 2, (1, 2))
    u1 = unitary_propagator(H, 0.4).mat
    u2 = unitary_propagator(H, 0.9).mat
    u12 = unitary_propagator(H, 1.3).mat
    assert np.max(np.abs(u1 @ u2 - u12)) < 1e-10
    assert np.max(np.abs(u1 @ u1.conj().T - np.eye(4))) < 1e-10


def test_unitary_propagator_rejects_non_hermitian(rng):
    bad = random_labeled(rng, 2, (1,), hermitian=False)
    with pytest.raises(ValueError):
        unitary_propagator(bad, 1.0)


def test_symmetrize_single_particle(rng):
    f = random_labeled(rng, 2, (1,))
    assert np.allclose(symmetrize(f).mat, f.mat)


def test_symmetrize_idempotent(rng):
    f = random_labeled(rng, 2, (1, 2, 3))
    once = symmetrize(f, +1)
    twice = symmetrize(once, +1)
    assert np.allclose(once.mat, twice.mat, atol=1e-12)


def test_antisymmetrizer_rank():
    # oracle: build the two-particle antisymmetrizer from explicit
    # permutation matrices and compare rank and matrix
    d = 2
    P_swap = permutation_matrix((1, 0), d)
    S_minus_oracle = (np.eye(d * d) - P_swap) / 2
    S_minus = symmetrizer_matrix(2, d, sign=-1)
    assert np.allclose(S_minus, S_minus_oracle, atol=1e-14)
    assert np.linalg.matrix_rank(S_minus) == 1


def test_symmetrizers_are_projectors():
    for sign in (+1, -1):
        S = symmetrizer_matrix(3, 2, sign)
        assert np.max(np.abs(S @ S - S)) < 1e-12
        assert np.max(np.abs(S - S.conj().T)) < 1e-12


def test_slot_permute_matches_permutation_matrix(rng):
    op = random_labeled(rng, 2, (1, 2, 3), hermitian=False)
    perm = (2, 0, 1)
    got = slot_permute(op, perm)
    P = permutation_matrix(perm, 2)
    assert np.allclose(got.mat, P @ op.mat @ P.T, atol=1e-13)


def test_tensor_product_label_interleaving(rng):
    a = random_labeled(rng, 2, (1, 3), hermitian=False)
    b = random_labeled(rng, 2, (2,), hermitian=False)
    got = tensor_product([a, b])
    assert got.labels == (1, 2, 3)
    # oracle: embed separately and multiply in the other order
    other = embed(b, (1, 2, 3)).mat @ embed(a, (1, 2, 3)).mat
    assert np.allclose(got.mat, other, atol=1e-13)
    with pytest.raises(ValueError):
        tensor_product([a, random_labeled(rng, 2, (1,), hermitian=False)])


def test_labels_validation():
    with pytest.raises(ValueError):
        ParticleOperator((2, 1), np.eye(4), 2)
    with pytest.raises(ValueError):
        ParticleOperator((0, 1), np.eye(4), 2)
    with pytest.raises(ValueError):
        ParticleOperator((1,), np.eye(3), 2)
    r = relabel(ParticleOperator((1, 2), np.eye(4), 2), (3, 5))
    assert r.labels == (3, 5)
