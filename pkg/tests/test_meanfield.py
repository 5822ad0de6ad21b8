import numpy as np
import pytest

from bbgky_lab.config import make_system, random_sequence_raw
from bbgky_lab.hierarchy import nonlinear_bbgky_rhs
from bbgky_lab.meanfield import (RK4_STEP, ScalingExperiment, epsilon_scaling,
                                 hartree_pure, pure_state_density, series_horizon,
                                 vlasov_hierarchy_rhs, vlasov_integrate,
                                 vlasov_kinetic_rhs, vlasov_series)
from bbgky_lab.operators import (ParticleOperator, relabel, tensor_product,
                                 trace_norm)
from bbgky_lab.partitions import partitions
from bbgky_lab.sequences import OperatorSequence, block_product


@pytest.fixture()
def one_particle_state(rng):
    raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    rho = raw @ raw.conj().T
    return ParticleOperator((1,), rho / np.trace(rho).real, 2)


def test_hierarchy_rhs_free_streaming(free_system, rng):
    seq = random_sequence_raw(2, 3, rng, "bounded")
    got = vlasov_hierarchy_rhs(free_system, seq, 1)
    want = free_system.free_liouville(seq.component(1), 1)
    # with zero interaction only the one-body streaming term remains
    assert np.max(np.abs(got.mat - want.mat)) < 1e-14


def test_hierarchy_rhs_one_particle_is_kinetic_with_uncorrelated_pair(system, one_particle_state):
    g1 = one_particle_state * 0.5
    pair = tensor_product([relabel(g1, (1,)), relabel(g1, (2,))])
    seq = OperatorSequence.from_matrices(
        2, [g1.mat, np.zeros((4, 4)), np.zeros((8, 8))])
    got = vlasov_hierarchy_rhs(system, seq, 1)
    want = vlasov_kinetic_rhs(system, g1)
    assert np.max(np.abs(got.mat - want.mat)) < 1e-14


def test_hierarchy_rhs_difference_is_intra_set_interaction(system, rng):
    # oracle: term-by-term assembly of the interactions inside the set
    seq = random_sequence_raw(2, 3, rng, "correlation", component_norm=0.4)
    s = 2
    full = nonlinear_bbgky_rhs(system, seq, s)
    limit = vlasov_hierarchy_rhs(system, seq, s)
    labels = (1, 2)
    intra = system.interaction_liouville(seq.component(2), (1, 2)).mat.copy()
    for p in partitions(labels, block_count=2):
        X1, X2 = p.blocks
        prod = block_product(seq, (X1, X2), labels)
        for i1 in X1:
            for i2 in X2:
                intra += system.interaction_liouville(prod, (i1, i2)).mat
    assert np.max(np.abs(full.mat - limit.mat - intra)) < 1e-12
    with pytest.raises(ValueError):
        vlasov_hierarchy_rhs(system, seq, 3)


def test_kinetic_free_case_is_exact(free_system, one_particle_state):
    traj = vlasov_integrate(free_system, one_particle_state, [0.8])
    want = free_system.evolve(one_particle_state, 0.8)
    assert trace_norm(traj[-1] - want) < 1e-12


def test_kinetic_trace_and_hermiticity(system, one_particle_state):
    traj = vlasov_integrate(system, one_particle_state, [0.5, 1.0])
    for op in traj:
        assert abs(op.trace() - 1.0) < 1e-9
        assert op.is_hermitian(1e-9)


def test_kinetic_matches_series_inside_horizon(system, one_particle_state):
    t0 = series_horizon(system, one_particle_state)
    tq = 0.25 * t0
    traj = vlasov_integrate(system, one_particle_state, [tq])
    ser = vlasov_series(system, one_particle_state, tq, order_cap=8)
    assert trace_norm(traj[-1] - ser) < 1e-6


def test_series_low_order_and_free_cases(system, free_system, one_particle_state):
    got = vlasov_series(system, one_particle_state, 0.4, order_cap=0)
    want = system.evolve(one_particle_state, 0.4)
    assert trace_norm(got - want) < 1e-12
    free_full = vlasov_series(free_system, one_particle_state, 0.4, order_cap=8)
    free_want = free_system.evolve(one_particle_state, 0.4)
    assert trace_norm(free_full - free_want) < 1e-12


def test_series_self_consistency(system, one_particle_state):
    tq = 0.25 * series_horizon(system, one_particle_state)
    s6 = vlasov_series(system, one_particle_state, tq, order_cap=6)
    s8 = vlasov_series(system, one_particle_state, tq, order_cap=8)
    assert trace_norm(s8 - s6) < 1e-7


def test_series_horizon_warning(system, one_particle_state):
    messages = []
    vlasov_series(system, one_particle_state, 2.0, order_cap=2,
                  warn=messages.append)
    assert messages and "horizon" in messages[0]


def test_step_doubling(system, one_particle_state):
    a = vlasov_integrate(system, one_particle_state, [0.5], step=RK4_STEP)
    b = vlasov_integrate(system, one_particle_state, [0.5], step=RK4_STEP / 2)
    assert trace_norm(a[-1] - b[-1]) < 1e-8


def test_hartree_free_case(free_system):
    psi0 = np.array([1.0, 1.0j]) / np.sqrt(2)
    traj = hartree_pure(free_system, psi0, [0.7])
    from bbgky_lab.operators import unitary_propagator
    want = unitary_propagator(free_system.kinetic, 0.7) @ psi0
    assert np.max(np.abs(traj[-1] - want)) < 1e-10


def test_hartree_norm_and_density_agreement(system):
    psi0 = np.array([0.6, 0.8], dtype=complex)
    traj = hartree_pure(system, psi0, [0.5, 1.0])
    for psi in traj:
        assert abs(np.linalg.norm(psi) - 1.0) < 1e-9
    rho_traj = vlasov_integrate(
        system, ParticleOperator((1,), pure_state_density(psi0), 2), [0.5, 1.0])
    for psi, rho in zip(traj[1:], rho_traj[1:]):
        got = ParticleOperator((1,), pure_state_density(psi), 2)
        assert trace_norm(got - rho) < 1e-8


def test_hartree_requires_normalized_state(system):
    with pytest.raises(ValueError):
        hartree_pure(system, np.array([1.0, 1.0]), [0.5])


def test_blowup_guard(config3, one_particle_state):
    wild = make_system(config3, potential_scale=4000.0)
    with pytest.raises(RuntimeError):
        vlasov_integrate(wild, one_particle_state, [2.0], step=0.05)


def test_scaling_experiment_validation(one_particle_state):
    with pytest.raises(ValueError):
        ScalingExperiment(epsilons=(0.5, 1.0), times=(0.5,),
                          base_one_particle=one_particle_state)
    with pytest.raises(ValueError):
        ScalingExperiment(epsilons=(1.0, -0.5), times=(0.5,),
                          base_one_particle=one_particle_state)


def test_epsilon_ladder_monotone(config3, one_particle_state):
    exp = ScalingExperiment(epsilons=(1.0, 0.5, 0.25, 0.125), times=(0.5,),
                            base_one_particle=one_particle_state * 0.5)
    report, norms, gaps = epsilon_scaling(
        lambda eps: make_system(config3, potential_scale=eps), exp, n_max=3)
    assert report.passed
    # strict halving for the pair norms
    seq = [norms[eps, 0.5, 2] for eps in (1.0, 0.5, 0.25, 0.125)]
    assert all(a > b for a, b in zip(seq, seq[1:]))
    gseq = [gaps[eps, 0.5] for eps in (1.0, 0.5, 0.25, 0.125)]
    assert all(a > b for a, b in zip(gseq, gseq[1:]))


def test_epsilon_ladder_free_case(config3, one_particle_state):
    exp = ScalingExperiment(epsilons=(1.0, 0.5), times=(0.5,),
                            base_one_particle=one_particle_state * 0.5)
    _, norms, _ = epsilon_scaling(
        lambda eps: make_system(config3, potential_scale=0.0), exp, n_max=3)
    for (eps, t, s), val in norms.items():
        if s >= 2:
            assert val < 1e-12
