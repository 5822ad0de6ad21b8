from math import e, factorial

import numpy as np
import pytest

from bbgky_lab.cumulants import (cluster_cumulant, cumulant_apply,
                                 forward_cumulant, scattering_cumulant,
                                 verify_cumulant_bound)
from bbgky_lab.operators import tensor_product, trace_norm
from conftest import random_labeled


def two_cluster_oracle(system, t, f):
    """Oracle: explicit two-term sum, joint group minus factorized groups."""
    joint = system.evolve(f, t)
    split = system.evolve_subset(system.evolve_subset(f, (f.labels[0],), t),
                                 (f.labels[1],), t)
    return joint - split


def test_single_cluster_is_the_group(system, rng):
    f = random_labeled(rng, 2, (1, 2))
    got = cluster_cumulant(system, 0.8, ((1, 2),), f)
    assert trace_norm(got - system.evolve(f, 0.8)) < 1e-12


def test_kronecker_property_at_t0(system, rng):
    f = random_labeled(rng, 2, (1, 2))
    z = cluster_cumulant(system, 0.0, ((1,), (2,)), f)
    assert np.max(np.abs(z.mat)) < 1e-12
    f3 = random_labeled(rng, 2, (1, 2, 3))
    for clusters in (((1,), (2,), (3,)), ((1, 2), (3,))):
        z = cluster_cumulant(system, 0.0, clusters, f3)
        assert np.max(np.abs(z.mat)) < 1e-12
    one = cluster_cumulant(system, 0.0, ((1, 2, 3),), f3)
    assert trace_norm(one - f3) < 1e-12


def test_two_cluster_cumulant_matches_oracle(system, rng):
    f = random_labeled(rng, 2, (1, 2))
    got = cluster_cumulant(system, 0.6, ((1,), (2,)), f)
    want = two_cluster_oracle(system, 0.6, f)
    assert trace_norm(got - want) < 1e-12


def test_free_dynamics_makes_cumulants_vanish(free_system, rng):
    prod = tensor_product([random_labeled(rng, 2, (1,)),
                           random_labeled(rng, 2, (2,))])
    z = cluster_cumulant(free_system, 1.0, ((1,), (2,)), prod)
    assert trace_norm(z) < 1e-12
    f3 = random_labeled(rng, 2, (1, 2, 3))
    assert trace_norm(cluster_cumulant(free_system, 0.7, ((1, 2), (3,)), f3)) < 1e-12


def test_forward_cumulant_specializes(system, rng):
    f = random_labeled(rng, 2, (1, 2))
    got = forward_cumulant(system, 0.5, (1,), (2,), f)
    want = two_cluster_oracle(system, 0.5, f)
    assert trace_norm(got - want) < 1e-12
    same = cluster_cumulant(system, 0.5, ((1,), (2,)), f)
    assert trace_norm(got - same) < 1e-12
    plain = forward_cumulant(system, 0.5, (1, 2), (), f)
    assert trace_norm(plain - system.evolve(f, 0.5)) < 1e-12
    with pytest.raises(ValueError):
        forward_cumulant(system, 0.5, (1, 2), (2,), f)


def test_cumulant_label_validation(system, rng):
    f = random_labeled(rng, 2, (1, 2))
    with pytest.raises(ValueError):
        cluster_cumulant(system, 0.5, ((1,), (3,)), f)
    with pytest.raises(ValueError):
        cluster_cumulant(system, 0.5, ((1,),), f)  # union != labels


def test_scattering_cumulant_pair_identity(system, rng):
    # with one-particle scattering operators equal to the identity, the
    # second-order scattering cumulant is the pair scattering operator
    # minus the identity
    f = tensor_product([random_labeled(rng, 2, (1,)),
                        random_labeled(rng, 2, (2,))])
    got = scattering_cumulant(system, 0.9, ((1,), (2,)), f)
    want = system.scatter(f, 0.9) - f
    assert trace_norm(got - want) < 1e-12


def test_scattering_cumulant_identities(system, free_system, rng):
    f = random_labeled(rng, 2, (1, 2))
    assert trace_norm(scattering_cumulant(system, 0.0, ((1, 2),), f) - f) < 1e-12
    z = scattering_cumulant(free_system, 1.2, ((1,), (2,)), f)
    assert trace_norm(z) < 1e-12


def test_cumulants_resum_to_group(system, rng):
    # partition-summed cumulant products reconstruct the full group
    for clusters in (((1,), (2,)), ((1,), (2,), (3,)), ((1, 2), (3,))):
        labels = tuple(sorted(x for c in clusters for x in c))
        f = random_labeled(rng, 2, labels)
        from bbgky_lab.partitions import cluster_partitions
        acc = np.zeros_like(f.mat)
        for grouping in cluster_partitions(clusters):
            term = f
            for group in grouping:
                term = cumulant_apply(system, 0.8, group, term)
            acc += term.mat
        assert np.max(np.abs(acc - system.evolve(f, 0.8).mat)) < 1e-11


def test_cumulant_bound_first_order_is_isometry(system):
    rep = verify_cumulant_bound(system, 1, 0.9, sample_count=20, seed=3)
    row = rep.rows[0]
    assert row.measured == pytest.approx(1.0, abs=1e-10)
    assert row.limit == pytest.approx(e)
    assert row.passed


@pytest.mark.parametrize("n,t", [(2, 1.0), (3, 0.1), (3, 1.0)])
def test_cumulant_bound_holds(system, n, t):
    rep = verify_cumulant_bound(system, n, t, sample_count=100, seed=11)
    row = rep.rows[0]
    assert row.limit == pytest.approx(factorial(n) * e ** n)
    assert row.passed, (row.measured, row.limit)
