import itertools
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbgky_lab.partitions import (ClusterSet, SetPartition, bell_number,
                                  cluster_partitions, compositions, decluster,
                                  moebius_coefficient, partition_counts,
                                  partitions, stirling_row, two_block_partitions)


def brute_force_partitions(items):
    """Oracle: enumerate partitions by assigning each item to a block id."""
    items = list(items)
    out = set()
    for assignment in itertools.product(range(len(items)), repeat=len(items)):
        blocks = {}
        for item, b in zip(items, assignment):
            blocks.setdefault(b, []).append(item)
        out.add(tuple(sorted(tuple(sorted(b)) for b in blocks.values())))
    return out


def bell_oracle(n):
    """Oracle: Bell numbers from the binomial recurrence."""
    bells = [1]
    for m in range(n):
        bells.append(sum(
            factorial(m) // (factorial(k) * factorial(m - k)) * bells[k]
            for k in range(m + 1)))
    return bells[n]


def stirling_oracle(n, k):
    """Oracle: s(n, k) = k s(n-1, k) + s(n-1, k-1)."""
    if n == k == 0:
        return 1
    if n == 0 or k == 0:
        return 0
    return k * stirling_oracle(n - 1, k) + stirling_oracle(n - 1, k - 1)


def test_two_element_partitions_listed():
    got = [p.blocks for p in partitions((1, 2))]
    assert got == [((1, 2),), ((1,), (2,))]
    assert len(got) == bell_number(2) == 2


def test_three_element_count_is_bell():
    assert len(partitions((1, 2, 3))) == 5 == bell_number(3)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=6))
def test_enumeration_matches_brute_force(n):
    ground = tuple(range(1, n + 1))
    got = {p.blocks for p in partitions(ground)}
    assert got == brute_force_partitions(ground)
    assert len(got) == bell_oracle(n)


@settings(max_examples=20, deadline=None)
@given(st.sets(st.integers(min_value=1, max_value=30), min_size=1, max_size=6))
def test_partitions_cover_and_are_disjoint(ground):
    for p in partitions(tuple(ground)):
        seen = [x for b in p.blocks for x in b]
        assert sorted(seen) == sorted(ground)
        assert len(set(seen)) == len(seen)
        assert [b[0] for b in p.blocks] == sorted(b[0] for b in p.blocks)


def test_pinned_two_block_example():
    got = [p.blocks for p in partitions((1, 2, 3), block_count=2,
                                        pinned={1: [1], 2: [3]})]
    assert got == [((1, 2), (3,)), ((1,), (2, 3))]


def test_contradictory_pins_empty():
    assert partitions((1, 2, 3), pinned={1: [1], 2: [1]}) == []


@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_pinned_count_is_power_of_two(s):
    ground = tuple(range(1, s + 2))
    got = two_block_partitions(ground, first=1, second=s + 1)
    # oracle: exhaustive membership filter
    want = [p for p in brute_force_partitions(ground)
            if len(p) == 2 and not any(1 in b and s + 1 in b for b in p)]
    assert len(got) == len(want) == 2 ** (s - 1)
    for X1, X2 in got:
        assert 1 in X1 and s + 1 in X2


def test_two_block_orientation():
    got = two_block_partitions((1, 2, 3), first=2, second=1)
    for X1, X2 in got:
        assert 2 in X1 and 1 in X2


def test_moebius_coefficients():
    assert moebius_coefficient(SetPartition(((1, 2),))) == 1
    assert moebius_coefficient(SetPartition(((1,), (2,)))) == -1
    assert moebius_coefficient(SetPartition(((1,), (2,), (3,)))) == 2


@pytest.mark.parametrize("n", range(1, 8))
def test_moebius_delta_identity(n):
    total = sum(moebius_coefficient(p) for p in partitions(range(1, n + 1)))
    assert total == (1 if n == 1 else 0)


def test_block_count_matches_stirling():
    for n in range(1, 7):
        for k in range(1, n + 1):
            got = len(partitions(tuple(range(n)), block_count=k))
            assert got == stirling_oracle(n, k)


def test_partition_counts():
    assert partition_counts(1) == {"bell": 1, "stirling": [1]}
    row = partition_counts(3)
    assert row["stirling"] == [1, 3, 1] and row["bell"] == 5
    assert partition_counts(4)["stirling"] == [stirling_oracle(4, k)
                                               for k in range(1, 5)]
    for n in range(1, 13):
        assert sum(stirling_row(n)) == bell_number(n)
    with pytest.raises(ValueError):
        partition_counts(13)


def test_stirling_factorial_inequality():
    import math
    for n in range(1, 11):
        total = sum(v * factorial(k) for k, v in enumerate(stirling_row(n)))
        assert total <= factorial(n) * math.e ** n
    # displayed reference point: sum for n=4 under 4! e**4
    total4 = sum(v * factorial(k) for k, v in enumerate(stirling_row(4)))
    assert total4 == 1 * 1 + 7 * 1 + 6 * 2 + 1 * 6
    assert total4 <= factorial(4) * math.e ** 4


def test_decluster():
    assert decluster(ClusterSet(((1, 2, 3),))) == (1, 2, 3)
    assert decluster((((1,), (2,), (3,)))) == (1, 2, 3)
    assert decluster(((1, 2), (5,))) == (1, 2, 5)
    with pytest.raises(ValueError):
        ClusterSet(((1, 2), (2, 3)))


def test_cluster_partitions():
    assert cluster_partitions(((1, 2),)) == [(((1, 2),),)]
    assert len(cluster_partitions(((1,), (2,)))) == 2
    groupings = cluster_partitions(((1, 2), (3,), (4,)))
    assert len(groupings) == bell_number(3) == 5
    merged = [decluster(g) for g in groupings[0]]
    assert merged == [(1, 2, 3, 4)]
    # oracle: relabel the clusters as atoms and re-enumerate
    atoms = {0: (1, 2), 1: (3,), 2: (4,)}
    want = {tuple(tuple(atoms[i] for i in blk) for blk in p.blocks)
            for p in partitions(range(3))}
    assert set(groupings) == want


def test_compositions():
    assert compositions(0, 1) == [(0,)]
    assert set(compositions(2, 2)) == {(0, 2), (1, 1), (2, 0)}
    assert len(compositions(3, 3)) == 10
    assert all(sum(c) == 3 for c in compositions(3, 3))


def test_partition_validation():
    with pytest.raises(ValueError):
        SetPartition(((1, 2), (2, 3)))
    with pytest.raises(ValueError):
        SetPartition(((1,), ()))
    with pytest.raises(ValueError):
        partitions(())
