"""Set partitions, cluster sets, and the coefficient algebra over them.

All enumeration is deterministic: partitions are generated from
restricted-growth strings in lexicographic order, and blocks inside a
partition are ordered by their smallest element. Every expansion in the
package accumulates terms in this canonical order, which makes runs
bit-reproducible.
"""

import itertools
from dataclasses import dataclass
from math import factorial

__all__ = [
    "SetPartition",
    "ClusterSet",
    "partitions",
    "cluster_partitions",
    "two_block_partitions",
    "decluster",
    "moebius_coefficient",
    "bell_number",
    "stirling_row",
    "partition_counts",
    "compositions",
]

_MAX_COUNT_N = 12


def _canonical_blocks(blocks):
    blocks = tuple(tuple(sorted(b)) for b in blocks)
    if any(not b for b in blocks):
        raise ValueError("blocks must be nonempty")
    return tuple(sorted(blocks, key=lambda b: b[0]))


@dataclass(frozen=True)
class SetPartition:
    """A partition of a finite label set into disjoint nonempty blocks."""

    blocks: tuple

    def __post_init__(self):
        blocks = _canonical_blocks(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        seen = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block in partition")
            if seen & set(b):
                raise ValueError(f"overlapping blocks in partition: {blocks}")
            seen |= set(b)

    @property
    def block_count(self):
        return len(self.blocks)

    def ground_set(self):
        return tuple(sorted(x for b in self.blocks for x in b))

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)


@dataclass(frozen=True)
class ClusterSet:
    """Disjoint label blocks treated as atomic units ("clusters")."""

    clusters: tuple

    def __post_init__(self):
        clusters = _canonical_blocks(self.clusters)
        object.__setattr__(self, "clusters", clusters)
        seen = set()
        for c in clusters:
            if not c:
                raise ValueError("empty cluster")
            if seen & set(c):
                raise ValueError(f"overlapping clusters: {clusters}")
            seen |= set(c)

    def labels(self):
        """Union of all clusters, i.e. the declusterization of the set."""
        return tuple(sorted(x for c in self.clusters for x in c))

    def __iter__(self):
        return iter(self.clusters)

    def __len__(self):
        return len(self.clusters)


def decluster(cs):
    """Union of the clusters of a ClusterSet (or iterable of blocks)."""
    if not isinstance(cs, ClusterSet):
        cs = ClusterSet(tuple(tuple(c) for c in cs))
    return cs.labels()


def _rgs_partitions(items):
    """Yield partitions of ``items`` from restricted-growth strings."""
    n = len(items)
    if n == 0:
        return
    a = [0] * n
    while True:
        nblocks = max(a) + 1
        blocks = [[] for _ in range(nblocks)]
        for x, g in zip(items, a):
            blocks[g].append(x)
        yield SetPartition(tuple(tuple(b) for b in blocks))
        # next restricted-growth string in lexicographic order
        j = n - 1
        while j > 0 and a[j] == max(a[:j]) + 1:
            j -= 1
        if j == 0:
            return
        a[j] += 1
        for i in range(j + 1, n):
            a[i] = 0


def _satisfies_pins(partition, pinned):
    """True if blocks can be assigned to pin roles consistently.

    ``pinned`` maps a role (e.g. 1 for the first subset, 2 for the second) to
    the labels that must all sit in the block playing that role; distinct
    roles must map to distinct blocks.
    """
    assignment = {}
    used = set()
    for role, labels in pinned.items():
        labels = list(labels)
        homes = {next((i for i, b in enumerate(partition.blocks) if lab in b), None)
                 for lab in labels}
        if len(homes) != 1 or None in homes:
            return False
        home = homes.pop()
        if home in used:
            return False
        assignment[role] = home
        used.add(home)
    return True


def partitions(ground, block_count=None, pinned=None):
    """All partitions of ``ground`` in canonical order.

    ``block_count`` restricts to partitions with exactly that many blocks.
    ``pinned`` is a mapping role -> labels; a partition qualifies when its
    blocks can play the roles (one distinct block per role, containing all
    of that role's labels). Contradictory pins just yield an empty list.
    """
    items = tuple(sorted(ground))
    if not items:
        raise ValueError("cannot partition an empty set")
    out = []
    for p in _rgs_partitions(items):
        if block_count is not None and p.block_count != block_count:
            continue
        if pinned and not _satisfies_pins(p, pinned):
            continue
        out.append(p)
    return out


def two_block_partitions(ground, first, second):
    """Ordered two-block splits (X1, X2) with ``first`` in X1, ``second`` in X2."""
    out = []
    for p in partitions(ground, block_count=2, pinned={1: [first], 2: [second]}):
        b1, b2 = p.blocks
        if first in b1:
            out.append((b1, b2))
        else:
            out.append((b2, b1))
    return out


def cluster_partitions(cs):
    """All partitions of a cluster set into groups of clusters.

    Each result is a tuple of groups; a group is a tuple of clusters. Order
    is canonical (clusters compared by smallest label).
    """
    if not isinstance(cs, ClusterSet):
        cs = ClusterSet(tuple(tuple(c) for c in cs))
    clusters = cs.clusters
    out = []
    for p in partitions(range(len(clusters))):
        out.append(tuple(tuple(clusters[i] for i in blk) for blk in p.blocks))
    return out


def moebius_coefficient(p):
    """Partition-lattice coefficient (-1)**(|P|-1) * (|P|-1)!."""
    b = p.block_count if isinstance(p, SetPartition) else len(p)
    return (-1) ** (b - 1) * factorial(b - 1)


def bell_number(n):
    """Number of partitions of an n-set (exact integer)."""
    if not 0 <= n <= _MAX_COUNT_N:
        raise ValueError(f"n must be in 0..{_MAX_COUNT_N}, got {n}")
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def stirling_row(n):
    """Stirling numbers of the second kind s(n, 1..n) as exact integers."""
    if not 1 <= n <= _MAX_COUNT_N:
        raise ValueError(f"n must be in 1..{_MAX_COUNT_N}, got {n}")
    row = [1]
    for m in range(2, n + 1):
        prev = row
        row = []
        for k in range(1, m + 1):
            left = prev[k - 2] if k >= 2 else 0
            right = k * prev[k - 1] if k <= m - 1 else 0
            row.append(left + right)
    return row


def partition_counts(n):
    """Bell number and Stirling second-kind row for an n-set."""
    return {"bell": bell_number(n), "stirling": stirling_row(n)}


def compositions(total, parts):
    """Ordered tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 0:
        return [()] if total == 0 else []
    out = []
    for cuts in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        sizes = []
        for c in cuts:
            sizes.append(c - prev - 1)
            prev = c
        sizes.append(total + parts - 2 - prev)
        out.append(tuple(sizes))
    return out
