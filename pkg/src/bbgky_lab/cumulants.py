"""Cumulants of groups of operators over cluster sets.

A cumulant is the alternating sum, over partitions of a cluster set into
groups, of the products of unitary-conjugation groups acting on each merged
group. First order reduces to the plain group; at t = 0 every higher order
vanishes, and without interaction every higher order vanishes identically.
"""

from math import e, factorial

import numpy as np

from .operators import ParticleOperator, trace_norm
from .partitions import ClusterSet, cluster_partitions, decluster, moebius_coefficient
from .report import CheckRow, VerificationReport

__all__ = [
    "cluster_cumulant",
    "forward_cumulant",
    "scattering_cumulant",
    "cumulant_apply",
    "verify_cumulant_bound",
]


def _group_matrix(system, t, group_labels, all_labels, kind):
    """Embedded matrix of the (scattering) group acting on ``group_labels``."""
    pos = tuple(all_labels.index(lab) for lab in group_labels)
    n = len(all_labels)
    if kind == "group":
        return system.embedded_propagator(pos, n, t)
    if kind == "scattering":
        key = ("scatter", pos, n, float(t))
        cached = system._embedded_unitaries.get(key)
        if cached is None:
            W = system.scattering_matrix(len(group_labels), t)
            if len(group_labels) != n:
                from . import kernels
                W = kernels.embed(W, pos, n, system.d)
            system._embedded_unitaries[key] = W
            cached = W
        return cached
    raise ValueError(f"unknown cumulant kind: {kind!r}")


def _grouping_matrix(system, t, grouping, all_labels, kind):
    """Product of group matrices over one partition of the clusters; cached
    per slot structure since it is requested once per expansion term."""
    pos_key = tuple(tuple(all_labels.index(lab) for lab in decluster(group))
                    for group in grouping)
    key = (kind, pos_key, len(all_labels), float(t))
    cached = system._embedded_unitaries.get(key)
    if cached is None:
        W = None
        for group in grouping:
            Wg = _group_matrix(system, t, decluster(group), all_labels, kind)
            W = Wg if W is None else W @ Wg
        system._embedded_unitaries[key] = W
        cached = W
    return cached


def cumulant_apply(system, t, clusters, op, kind="group"):
    """Apply the cluster cumulant of the given order to ``op``.

    ``clusters`` is an iterable of disjoint label blocks; their union may be
    a strict subset of ``op.labels`` (the remaining factors are spectators).
    Terms are accumulated in canonical partition order.
    """
    cs = clusters if isinstance(clusters, ClusterSet) else \
        ClusterSet(tuple(tuple(c) for c in clusters))
    missing = set(cs.labels()) - set(op.labels)
    if missing:
        raise ValueError(f"cluster labels {sorted(missing)} not in operand")
    total = np.zeros_like(op.mat)
    for grouping in cluster_partitions(cs):
        coeff = moebius_coefficient(grouping)
        W = _grouping_matrix(system, t, grouping, op.labels, kind)
        total += coeff * (W @ op.mat @ W.conj().T)
    return op.with_matrix(total)


def cluster_cumulant(system, t, clusters, op, kind="group"):
    """Cumulant of groups of operators; operand must live exactly on the
    declusterized union of the clusters."""
    cs = clusters if isinstance(clusters, ClusterSet) else \
        ClusterSet(tuple(tuple(c) for c in clusters))
    if cs.labels() != op.labels:
        raise ValueError(
            f"operand labels {op.labels} must equal the cluster union {cs.labels()}")
    return cumulant_apply(system, t, cs, op, kind)


def forward_cumulant(system, t, base, extras, op, kind="group"):
    """Cumulant of order 1 + len(extras): one cluster ``base`` plus singletons."""
    base = tuple(sorted(base))
    extras = tuple(sorted(extras))
    if set(base) & set(extras):
        raise ValueError("base cluster and extra labels overlap")
    clusters = (base,) + tuple((x,) for x in extras)
    return cluster_cumulant(system, t, clusters, op, kind)


def scattering_cumulant(system, t, clusters, op):
    """Cumulant built from scattering operators in place of the full groups."""
    return cluster_cumulant(system, t, clusters, op, kind="scattering")


def verify_cumulant_bound(system, n, t, sample_count=100, seed=0):
    """Check the trace-norm bound n! e**n for order-n cumulants on samples.

    Samples are seeded random Hermitian operators of unit trace norm on n
    singleton clusters.
    """
    if n > 4:
        raise ValueError("bound verification is desk-scale only (n <= 4)")
    rng = np.random.default_rng(seed)
    labels = tuple(range(1, n + 1))
    clusters = tuple((lab,) for lab in labels)
    dim = system.d ** n
    bound = factorial(n) * e ** n
    worst = 0.0
    for _ in range(sample_count):
        raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        herm = (raw + raw.conj().T) / 2
        herm /= trace_norm(herm)
        op = ParticleOperator(labels, herm, system.d)
        ratio = trace_norm(cluster_cumulant(system, t, clusters, op))
        worst = max(worst, ratio)
    row = CheckRow(
        name=f"cumulant trace-norm bound, order {n}, t={t}",
        tag="cumulant_norm_bound",
        measured=worst,
        limit=bound,
    )
    return VerificationReport(rows=[row])
