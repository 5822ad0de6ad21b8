"""Solution expansions and inter-representation maps for the hierarchies.

Everything here is an exact finite sum: sequences vanish above n_max, so the
solution series, the annihilation-type exponentials, and the cluster
expansions all close at desk scale. Terms are accumulated in canonical
partition order for bit-reproducibility, and the von Neumann components are
memoized per (particle count, time) because partition sums re-request the
same blocks many times over.
"""

from math import comb, e, factorial

import numpy as np

from .cumulants import cluster_cumulant, cumulant_apply, forward_cumulant
from .operators import (ParticleOperator, embed, partial_trace, relabel,
                        tensor_product, trace_norm)
from .partitions import (compositions, moebius_coefficient, partitions,
                         two_block_partitions)
from .report import VerificationReport
from .sequences import (EstimateConstants, OperatorSequence, block_product,
                        exp_annihilation, pairing, placed_component)

__all__ = [
    "solve_von_neumann",
    "von_neumann_sequence",
    "von_neumann_generator",
    "moment_operator",
    "cluster_correlation_from_particles",
    "cluster_correlation_evolve",
    "marginal_correlation",
    "marginal_density_from_clusters",
    "solve_bbgky",
    "reduced_cumulant",
    "solve_nonlinear_bbgky",
    "nonlinear_solution_sequence",
    "chaos_marginal_correlation",
    "nonlinear_bbgky_rhs",
    "componentwise_generator_term",
    "correlation_functional_low",
    "observable_stats",
    "weak_pairing_rhs",
    "estimate_constants",
    "verify_reduced_bound",
]


def _labels(a, b):
    return tuple(range(a, b + 1))


# -- von Neumann hierarchy -----------------------------------------------------

def solve_von_neumann(system, g0, s, t, memo=None):
    """Correlation operator of ``s`` particles at time ``t``.

    Expansion over partitions of (1..s): the cumulant of the partition blocks
    applied to the product of initial components on those blocks.
    """
    if not 1 <= s <= g0.n_max:
        raise ValueError(f"component {s} outside 1..{g0.n_max}")
    key = (s, float(t))
    if memo is not None and key in memo:
        return memo[key]
    labels = _labels(1, s)
    acc = np.zeros((g0.d ** s,) * 2, dtype=np.complex128)
    for p in partitions(labels):
        operand = block_product(g0, p.blocks, labels=labels)
        if operand is None:
            continue
        term = cluster_cumulant(system, t, p.blocks, operand)
        acc += term.mat
    out = ParticleOperator(labels, acc, g0.d)
    if memo is not None:
        memo[key] = out
    return out


def von_neumann_sequence(system, g0, t, memo=None):
    """All correlation components at time ``t`` as a sequence."""
    comps = [solve_von_neumann(system, g0, s, t, memo) for s in
             range(1, g0.n_max + 1)]
    return OperatorSequence(g0.d, g0.n_max, g0.scalar,
                            tuple(comps))


def von_neumann_generator(system, seq, s):
    """Hierarchy generator on component ``s``: full commutator term plus the
    interaction-coupled products over two-block splits of (1..s)."""
    labels = _labels(1, s)
    g_s = seq.component(s)
    acc = system.liouville(g_s).mat.copy()
    if s >= 2:
        for p in partitions(labels, block_count=2):
            X1, X2 = p.blocks
            prod = block_product(seq, (X1, X2), labels=labels)
            if prod is None:
                continue
            for i1 in X1:
                for i2 in X2:
                    acc += system.interaction_liouville(prod, (i1, i2)).mat
    return ParticleOperator(labels, acc, seq.d)


# -- cluster correlation operators ---------------------------------------------

def moment_operator(seq, labels):
    """Sum over partitions of ``labels`` of products of components."""
    labels = tuple(sorted(labels))
    acc = np.zeros((seq.d ** len(labels),) * 2, dtype=np.complex128)
    for p in partitions(labels):
        term = block_product(seq, p.blocks, labels=labels)
        if term is not None:
            acc += term.mat
    return ParticleOperator(labels, acc, seq.d)


def _cluster_correlation_static(seq, clusters):
    """Correlation operator of a cluster set from same-time particle
    correlations: partition-lattice inversion of the cluster moments."""
    from .partitions import ClusterSet, cluster_partitions, decluster
    cs = clusters if isinstance(clusters, ClusterSet) else \
        ClusterSet(tuple(tuple(c) for c in clusters))
    full = cs.labels()
    acc = np.zeros((seq.d ** len(full),) * 2, dtype=np.complex128)
    for grouping in cluster_partitions(cs):
        coeff = moebius_coefficient(grouping)
        factors = [moment_operator(seq, decluster(group)) for group in grouping]
        acc += coeff * tensor_product(factors, labels=full).mat
    return ParticleOperator(full, acc, seq.d)


def cluster_correlation_from_particles(g_t, base, extras=()):
    """Correlation operator of the cluster ``base`` plus singleton extras,
    recombined from the time-t particle correlation sequence (no dynamics)."""
    base = tuple(sorted(base))
    extras = tuple(sorted(extras))
    if set(base) & set(extras):
        raise ValueError("base cluster and extras overlap")
    clusters = (base,) + tuple((x,) for x in extras)
    return _cluster_correlation_static(g_t, clusters)


def cluster_correlation_evolve(system, g0, base, extras, t):
    """Same object, but propagated: cumulants over groups of clusters applied
    to products of initial cluster correlations."""
    from .partitions import ClusterSet, cluster_partitions, decluster
    base = tuple(sorted(base))
    extras = tuple(sorted(extras))
    if set(base) & set(extras):
        raise ValueError("base cluster and extras overlap")
    if len(base) + len(extras) > g0.n_max:
        raise ValueError("cluster set exceeds n_max")
    cs = ClusterSet((base,) + tuple((x,) for x in extras))
    full = cs.labels()
    acc = np.zeros((g0.d ** len(full),) * 2, dtype=np.complex128)
    for grouping in cluster_partitions(cs):
        factors = [_cluster_correlation_static(g0, group) for group in grouping]
        operand = tensor_product(factors, labels=full)
        merged = tuple(decluster(group) for group in grouping)
        acc += cluster_cumulant(system, t, merged, operand).mat
    return ParticleOperator(full, acc, g0.d)


# -- marginal operators ----------------------------------------------------------

def marginal_correlation(system, g0, s, t, memo=None):
    """Signed-free sum of partial traces of the evolved correlations."""
    if not 1 <= s <= g0.n_max:
        raise ValueError(f"component {s} outside 1..{g0.n_max}")
    memo = {} if memo is None else memo
    keep = _labels(1, s)
    acc = np.zeros((g0.d ** s,) * 2, dtype=np.complex128)
    for n in range(0, g0.n_max - s + 1):
        g = solve_von_neumann(system, g0, s + n, t, memo)
        acc += partial_trace(g, keep).mat / factorial(n)
    return ParticleOperator(keep, acc, g0.d)


def marginal_density_from_clusters(system, g0, s, t):
    """Marginal density from traces of evolved cluster correlations."""
    if not 1 <= s <= g0.n_max:
        raise ValueError(f"component {s} outside 1..{g0.n_max}")
    keep = _labels(1, s)
    acc = np.zeros((g0.d ** s,) * 2, dtype=np.complex128)
    for n in range(0, g0.n_max - s + 1):
        g = cluster_correlation_evolve(system, g0, keep, _labels(s + 1, s + n), t)
        acc += partial_trace(g, keep).mat / factorial(n)
    return ParticleOperator(keep, acc, g0.d)


def solve_bbgky(system, F0, s, t):
    """Marginal density at time t from initial marginal densities: traced
    forward cumulants applied to the initial components."""
    if not 1 <= s <= F0.n_max:
        raise ValueError(f"component {s} outside 1..{F0.n_max}")
    keep = _labels(1, s)
    acc = np.zeros((F0.d ** s,) * 2, dtype=np.complex128)
    for n in range(0, F0.n_max - s + 1):
        operand = placed_component(F0, _labels(1, s + n))
        term = forward_cumulant(system, t, keep, _labels(s + 1, s + n), operand)
        acc += partial_trace(term, keep).mat / factorial(n)
    return ParticleOperator(keep, acc, F0.d)


# -- nonlinear hierarchy: reduced cumulants and the solution ---------------------

def reduced_cumulant(system, t, base, extras, G0):
    """Reduced cumulant of the nonlinear groups acting on initial marginal
    correlations.

    Alternating binomial over how many of the extra labels are attached
    directly to initial components (in consecutive segments, block by block
    in canonical order) versus entering the partitioned ground set. Ground
    sets larger than n_max correspond to correlation components that vanish
    under the finite closure, so those binomial terms are zero and the
    admissible attachment count is bounded below.
    """
    base = tuple(sorted(base))
    extras = tuple(sorted(extras))
    s, n = len(base), len(extras)
    if s + n > G0.n_max * G0.n_max:
        raise ValueError("cluster set far beyond desk scale")
    full = tuple(sorted(base + extras))
    acc = np.zeros((G0.d ** (s + n),) * 2, dtype=np.complex128)
    k_min = max(0, s + n - G0.n_max)
    for k in range(k_min, n + 1):
        ground = base + extras[:n - k]
        if s + n > len(ground) * G0.n_max:
            continue  # no block assignment can cover the label budget
        attached = extras[n - k:]
        sign = (-1) ** k * comb(n, k)
        for p in partitions(ground):
            blocks = p.blocks
            if s + n > len(blocks) * G0.n_max:
                continue
            for sizes in compositions(k, len(blocks)):
                weight = sign * factorial(k)
                for m in sizes:
                    weight //= factorial(m)
                factors = []
                offset = 0
                ok = True
                for block, m in zip(blocks, sizes):
                    seg = attached[offset:offset + m]
                    offset += m
                    comp = placed_component(G0, tuple(sorted(block + seg)))
                    if comp is None:
                        ok = False
                        break
                    factors.append(comp)
                if not ok:
                    continue
                operand = tensor_product(factors, labels=full)
                term = cumulant_apply(system, t, blocks, operand)
                acc += weight * term.mat
    return ParticleOperator(full, acc, G0.d)


def _attachment_traced_components(G0):
    """comp[j][m]: component j+m with its trailing m factors traced out.

    Permutation symmetry makes the choice of traced slots irrelevant, so
    these small operators stand in for any attached-label segment.
    """
    out = {}
    for j in range(1, G0.n_max + 1):
        keep = _labels(1, j)
        out[j] = {m: partial_trace(G0.component(j + m), keep)
                  for m in range(0, G0.n_max - j + 1)}
    return out


def traced_reduced_cumulant(system, t, s, n, G0, traced=None):
    """Reduced cumulant with all extra labels traced out, on labels (1..s).

    Equivalent to tracing the full reduced cumulant, but attached labels are
    contracted inside each initial-data factor first, so no intermediate
    exceeds n_max tensor factors.
    """
    traced = _attachment_traced_components(G0) if traced is None else traced
    keep = _labels(1, s)
    acc = np.zeros((G0.d ** s,) * 2, dtype=np.complex128)
    k_min = max(0, s + n - G0.n_max)
    for k in range(k_min, n + 1):
        ground = _labels(1, s + n - k)
        if s + n > len(ground) * G0.n_max:
            continue
        sign = (-1) ** k * comb(n, k)
        for p in partitions(ground):
            blocks = p.blocks
            if s + n > len(blocks) * G0.n_max:
                continue
            for sizes in compositions(k, len(blocks)):
                weight = sign * factorial(k)
                factors = []
                for block, m in zip(blocks, sizes):
                    row = traced[len(block)]
                    if m not in row:
                        factors = None
                        break
                    weight /= factorial(m)
                    factors.append(relabel(row[m], block))
                if factors is None:
                    continue
                operand = tensor_product(factors, labels=ground)
                term = cumulant_apply(system, t, blocks, operand)
                acc += weight * partial_trace(term, keep).mat
    return ParticleOperator(keep, acc, G0.d)


def solve_nonlinear_bbgky(system, G0, s, t):
    """Marginal correlation operator at time t: traced reduced cumulants.

    The trace sum runs until the reduced cumulants vanish identically; under
    the finite closure that happens once the attached initial components can
    no longer cover the label budget (n_max * n_max - s is a safe cap).
    """
    if not 1 <= s <= G0.n_max:
        raise ValueError(f"component {s} outside 1..{G0.n_max}")
    keep = _labels(1, s)
    traced = _attachment_traced_components(G0)
    acc = np.zeros((G0.d ** s,) * 2, dtype=np.complex128)
    for n in range(0, G0.n_max * G0.n_max - s + 1):
        U = traced_reduced_cumulant(system, t, s, n, G0, traced)
        acc += U.mat / factorial(n)
    return ParticleOperator(keep, acc, G0.d)


def nonlinear_solution_sequence(system, G0, t):
    comps = [solve_nonlinear_bbgky(system, G0, s, t) for s in
             range(1, G0.n_max + 1)]
    return OperatorSequence(G0.d, G0.n_max, G0.scalar, tuple(comps))


def chaos_marginal_correlation(system, G1_0, s, t, n_max):
    """Closed chaos-data form: traced cumulants of all-singleton clusters
    applied to products of the one-particle initial operator."""
    keep = _labels(1, s)
    acc = np.zeros((G1_0.d ** s,) * 2, dtype=np.complex128)
    for n in range(0, n_max - s + 1):
        full = _labels(1, s + n)
        operand = tensor_product([relabel(G1_0, (i,)) for i in full])
        clusters = tuple((i,) for i in full)
        term = cluster_cumulant(system, t, clusters, operand)
        acc += partial_trace(term, keep).mat / factorial(n)
    return ParticleOperator(keep, acc, G1_0.d)


def nonlinear_bbgky_rhs(system, G_seq, s):
    """Right-hand side of the evolution equation for component ``s``:
    hierarchy generator plus the traced interaction term acting on the
    (s+1)-component and the pinned two-block products."""
    if s + 1 > G_seq.n_max:
        raise ValueError(f"component {s + 1} beyond n_max={G_seq.n_max}; the "
                         "traced term needs it")
    labels = _labels(1, s)
    ext = _labels(1, s + 1)
    acc = von_neumann_generator(system, G_seq, s).mat.copy()
    G_next = G_seq.component(s + 1)
    for i in labels:
        bracket = G_next.mat.copy()
        for X1, X2 in two_block_partitions(ext, first=i, second=s + 1):
            prod = block_product(G_seq, (X1, X2), labels=ext)
            if prod is not None:
                bracket += prod.mat
        term = system.interaction_liouville(
            ParticleOperator(ext, bracket, G_seq.d), (i, s + 1))
        acc += partial_trace(term, labels).mat
    return ParticleOperator(labels, acc, G_seq.d)


def componentwise_generator_term(system, seq, s, order):
    """Terms of the componentwise generator series of the solution map.

    Order 1 is the hierarchy generator, order 2 the single-trace term (in its
    raw, unreduced form), order 3 the double-trace term, which vanishes
    identically for two-body interactions.
    """
    labels = _labels(1, s)
    if order == 1:
        return von_neumann_generator(system, seq, s)
    if order == 2:
        ext = _labels(1, s + 1)
        f_next = seq.component(s + 1)
        if f_next is None:
            raise ValueError("order-2 term needs component s+1")
        acc = system.liouville(f_next).mat.copy()
        acc -= system.commutator_generator(
            f_next, system.hamiltonian_matrix(s), labels=labels).mat
        for p in partitions(ext, block_count=2):
            X1, X2 = p.blocks
            prod = block_product(seq, (X1, X2), labels=ext)
            if prod is not None:
                for i1 in X1:
                    for i2 in X2:
                        acc += system.interaction_liouville(prod, (i1, i2)).mat
        if s >= 2:
            for p in partitions(labels, block_count=2):
                X1, X2 = p.blocks
                for A, B in ((X1 + (s + 1,), X2), (X1, X2 + (s + 1,))):
                    prod = block_product(seq, (A, B), labels=ext)
                    if prod is None:
                        continue
                    for i1 in X1:
                        for i2 in X2:
                            acc -= system.interaction_liouville(prod, (i1, i2)).mat
        out = ParticleOperator(ext, acc, seq.d)
        return partial_trace(out, labels)
    if order == 3:
        return _generator_term_three(system, seq, s)
    raise ValueError("orders 1..3 are implemented")


def _generator_term_three(system, seq, s):
    labels = _labels(1, s)
    ext2 = _labels(1, s + 2)
    f2 = seq.component(s + 2)
    if f2 is None:
        raise ValueError("order-3 term needs component s+2")
    acc = system.liouville(f2).mat.copy()
    acc -= 2 * system.commutator_generator(
        f2, system.hamiltonian_matrix(s + 1), labels=_labels(1, s + 1)).mat
    acc += system.commutator_generator(
        f2, system.hamiltonian_matrix(s), labels=labels).mat
    yset = set(labels)
    for p in partitions(ext2, block_count=2):
        X1, X2 = p.blocks
        prod = block_product(seq, (X1, X2), labels=ext2)
        if prod is None:
            continue
        for i1 in set(X1) & yset:
            for i2 in set(X2) & yset:
                acc += system.interaction_liouville(prod, (i1, i2)).mat
    for p in partitions(_labels(1, s + 1), block_count=2):
        X1, X2 = p.blocks
        for A, B in ((X1 + (s + 2,), X2), (X1, X2 + (s + 2,))):
            prod = block_product(seq, (A, B), labels=ext2)
            if prod is None:
                continue
            for i1 in set(X1) & yset:
                for i2 in set(X2) & yset:
                    acc -= 2 * system.interaction_liouville(prod, (i1, i2)).mat
    if s >= 2:
        for p in partitions(labels, block_count=2):
            X1, X2 = p.blocks
            pieces = ((X1 + (s + 1, s + 2), X2, 1),
                      (X1, X2 + (s + 1, s + 2), 1),
                      (X1 + (s + 1,), X2 + (s + 2,), 2))
            for A, B, mult in pieces:
                prod = block_product(seq, (A, B), labels=ext2)
                if prod is None:
                    continue
                for i1 in X1:
                    for i2 in X2:
                        acc += mult * system.interaction_liouville(prod, (i1, i2)).mat
    out = ParticleOperator(ext2, acc, seq.d)
    return 0.5 * partial_trace(out, labels)


# -- marginal correlation functionals of the one-particle state -------------------

def correlation_functional_low(system, G1_t, s, order_cap, t):
    """Low orders of the expansion of s-particle correlations as functionals
    of the one-particle marginal correlation operator, via cumulants of
    scattering operators."""
    if s < 2:
        raise ValueError("the functional applies to s >= 2")
    if order_cap not in (0, 1):
        raise ValueError("orders beyond 1 are not supported (ordering "
                         "conventions of the higher evolution operators are "
                         "not pinned down)")
    labels = _labels(1, s)
    ones = [relabel(G1_t, (i,)) for i in labels]
    prod = tensor_product(ones, labels=labels)
    singletons = tuple((i,) for i in labels)
    out = cumulant_apply(system, t, singletons, prod, kind="scattering").mat
    if order_cap >= 1:
        ext = _labels(1, s + 1)
        prod_ext = tensor_product([relabel(G1_t, (i,)) for i in ext], labels=ext)
        singles_ext = tuple((i,) for i in ext)
        v2 = cumulant_apply(system, t, singles_ext, prod_ext,
                            kind="scattering").mat
        for i in labels:
            inner = cumulant_apply(system, t, ((i,), (s + 1,)), prod_ext,
                                   kind="scattering")
            outer = cumulant_apply(system, t, singletons, inner,
                                   kind="scattering")
            v2 -= outer.mat
        traced = partial_trace(ParticleOperator(ext, v2, G1_t.d), labels)
        out = out + traced.mat
    return ParticleOperator(labels, out, G1_t.d)


# -- observables -------------------------------------------------------------------

def observable_stats(a1, F1, G1, G2):
    """Mean and dispersion of an additive one-particle observable.

    mean = Tr(a F1); dispersion pairs (a^2 - mean^2) with the one-particle
    correlation and the two-site product a(1) a(2) with the pair correlation.
    """
    if not a1.is_hermitian(1e-10):
        raise ValueError("observable must be Hermitian")
    mean = complex(np.trace(a1.mat @ F1.mat))
    a_sq = a1.mat @ a1.mat
    eye = np.eye(a1.mat.shape[0])
    disp = complex(np.trace((a_sq - mean ** 2 * eye) @ G1.mat))
    pair = tensor_product([relabel(a1, (1,)), relabel(a1, (2,))], labels=(1, 2))
    disp += complex(np.trace(pair.mat @ G2.mat))
    return {"mean": mean, "dispersion": disp}


# -- weak formulation ---------------------------------------------------------------

def weak_pairing_rhs(system, f_seq, G_seq):
    """Bilinear form equal to the time derivative of the pairing (f, G(t)).

    The commutator maps act on the observable side with the opposite sign of
    the state-side generator.
    """
    total = 0.0 + 0.0j
    for s in range(1, f_seq.n_max + 1):
        labels = _labels(1, s)
        f_s = f_seq.component(s)
        G_s = G_seq.component(s)
        inv = 1.0 / factorial(s)
        term = -system.liouville(f_s).mat
        if s >= 2:
            f_low = f_seq.component(s - 1)
            for i in labels:
                for j in labels:
                    if i == j:
                        continue
                    rest = tuple(lab for lab in labels if lab != j)
                    femb = embed(relabel(f_low, rest), labels)
                    term = term - system.interaction_liouville(femb, (i, j)).mat
        total += inv * np.trace(term @ G_s.mat)
        if s >= 2:
            for p in partitions(labels, block_count=2):
                X1, X2 = p.blocks
                prod = block_product(G_seq, (X1, X2), labels=labels)
                if prod is None:
                    continue
                lhs = np.zeros_like(prod.mat)
                for i1 in X1:
                    for i2 in X2:
                        lhs += -system.interaction_liouville(f_s, (i1, i2)).mat
                total += inv * np.trace(lhs @ prod.mat)
            f_low = f_seq.component(s - 1)
            for i in labels:
                for j in labels:
                    if i == j:
                        continue
                    rest = tuple(lab for lab in labels if lab != j)
                    femb = embed(relabel(f_low, rest), labels)
                    lhs = -system.interaction_liouville(femb, (i, j)).mat
                    acc = np.zeros((G_seq.d ** s,) * 2, dtype=np.complex128)
                    for X1, X2 in two_block_partitions(labels, first=i, second=j):
                        prod = block_product(G_seq, (X1, X2), labels=labels)
                        if prod is not None:
                            acc += prod.mat
                    total += inv * np.trace(lhs @ acc)
    return complex(total)


# -- estimates -----------------------------------------------------------------------

def estimate_constants(g0):
    """Largest component norms entering the growth and convergence bounds."""
    norms = g0.norms()
    G0 = exp_annihilation(g0, +1)
    return EstimateConstants(c=max(norms), c_frak=max(G0.norms()))


def verify_reduced_bound(system, s, n, t, samples=50, seed=0, component_norm=0.02):
    """Check the reduced-cumulant trace-norm bound on seeded random data.

    All sequence components are normalized to a common trace norm, so the
    bound constant is that norm to the power s+n.
    """
    if s + n > 4:
        raise ValueError("bound verification is desk-scale only (s+n <= 4)")
    from .config import random_sequence_raw
    rng = np.random.default_rng(seed)
    base = _labels(1, s)
    extras = _labels(s + 1, s + n)
    bound = 2.0 * factorial(n) * factorial(s) * (2 * e ** 3) ** (s + n) \
        * component_norm ** (s + n)
    worst = 0.0
    n_max = max(s + n, 1)
    for _ in range(samples):
        G0 = random_sequence_raw(system.d, n_max, rng, kind="correlation",
                                 component_norm=component_norm)
        U = reduced_cumulant(system, t, base, extras, G0)
        worst = max(worst, trace_norm(U))
    report = VerificationReport()
    report.add(
        name=f"reduced cumulant bound, s={s}, n={n}, t={t}",
        tag="reduced_cumulant_bound",
        measured=worst,
        limit=bound,
    )
    return report
