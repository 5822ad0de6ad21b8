"""Finite-dimensional laboratory for the correlation-operator hierarchies of
quantum many-particle systems: labeled tensor algebra, set-partition
expansions, cumulants of unitary groups, the coupled evolution equations for
correlation and reduced density operators, and the mean-field limit.
"""

from .config import (SystemConfig, chaos_sequence, config_from_dict,
                     default_config_dict, genuine_state_sequence, load_config,
                     make_system, random_sequence)
from .cumulants import (cluster_cumulant, forward_cumulant, scattering_cumulant,
                        verify_cumulant_bound)
from .dynamics import (System, build_hamiltonian, evolve_group, liouvillian,
                       scattering_operator)
from .hierarchy import (chaos_marginal_correlation, cluster_correlation_evolve,
                        cluster_correlation_from_particles, correlation_functional_low,
                        marginal_correlation, marginal_density_from_clusters,
                        nonlinear_bbgky_rhs, observable_stats, reduced_cumulant,
                        solve_bbgky, solve_nonlinear_bbgky, solve_von_neumann)
from .meanfield import (ScalingExperiment, epsilon_scaling, hartree_pure,
                        vlasov_hierarchy_rhs, vlasov_integrate, vlasov_series)
from .operators import (ParticleOperator, embed, partial_trace, symmetrize,
                        trace_norm, unitary_propagator)
from .partitions import (ClusterSet, SetPartition, bell_number, cluster_partitions,
                         decluster, moebius_coefficient, partition_counts,
                         partitions, stirling_row)
from .sequences import (EstimateConstants, OperatorSequence, apply_creation,
                        cluster_expand, cluster_invert, exp_annihilation, pairing)
from .verify import run_scenario, verify_suite

__version__ = "0.1.0"
