import random
from itertools import permutations

import pytest

from gen import profile_from, random_incremental, random_roommates
from incstable.classic import stable_pairs
from incstable.incremental import perfectize
from incstable.model import (
    IncrementalInstance,
    Infeasible,
    Matching,
    ResourceLimit,
    is_stable,
    strictly_prefers,
)
from incstable.oracle import (
    all_matchings,
    brute_force_incremental,
    enumerate_stable,
    enumerate_stable_unpruned,
)


def test_odd_cycle_has_none():
    assert enumerate_stable(profile_from([[1, 2], [2, 0], [0, 1]])) == []


def test_mutual_pair():
    assert enumerate_stable(profile_from([[1], [0]])) == [Matching([(0, 1)])]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_all_tied_marriage_every_perfect_matching_stable(n):
    men, women = list(range(n)), list(range(n, 2 * n))
    lists = [[tuple(women)]] * n + [[tuple(men)]] * n
    p = profile_from(lists, (men, women))
    expected = sorted(Matching(zip(men, perm)) for perm in permutations(women))
    assert enumerate_stable(p) == expected


def test_bound_enforced():
    p = profile_from([[] for _ in range(13)])
    with pytest.raises(ResourceLimit):
        enumerate_stable(p)
    assert enumerate_stable(p, max_agents=13) == [Matching()]


def test_count_limit():
    four_cycle = profile_from([[1, 3], [2, 0], [3, 1], [0, 2]])
    assert len(enumerate_stable(four_cycle, limit=2)) == 2
    with pytest.raises(ResourceLimit):
        enumerate_stable(four_cycle, limit=1)


def test_known_counts():
    # Frozen from the unpruned enumeration.
    four_cycle = profile_from([[1, 3], [2, 0], [3, 1], [0, 2]])
    assert enumerate_stable(four_cycle) == [Matching([(0, 1), (2, 3)]), Matching([(0, 3), (1, 2)])]
    assert len(all_matchings(four_cycle)) == 7


@pytest.mark.parametrize("seed", range(120))
def test_pruned_equals_unpruned(seed):
    rng = random.Random(seed)
    p = random_roommates(rng, rng.randint(1, 6), rng.uniform(0.2, 1.0), ties=seed % 3 == 0)
    found = enumerate_stable(p)
    assert found == enumerate_stable_unpruned(p)
    assert all(is_stable(p, m) for m in found)


class TestIncrementalOracle:
    def test_identical_profiles_return_m1(self):
        inst = random_incremental(random.Random(7), 6, swaps=0)
        result = brute_force_incremental(inst)
        assert result.matching == inst.m1 and result.diff == 0

    def test_infeasible_when_p2_has_none(self):
        p1 = profile_from([[1, 2], [0, 2], [1, 0]])
        p2 = profile_from([[1, 2], [2, 0], [0, 1]])
        m1 = enumerate_stable(p1)[0]
        assert isinstance(brute_force_incremental(IncrementalInstance(p1, p2, m1, 3)), Infeasible)

    @pytest.mark.parametrize("seed", range(40))
    def test_minimum_with_lexicographic_tie_break(self, seed):
        inst = random_incremental(random.Random(seed), random.Random(seed).randint(3, 8), complete=seed % 2 == 0)
        result = brute_force_incremental(inst)
        stable = enumerate_stable(inst.profile2)
        if not stable:
            assert isinstance(result, Infeasible)
            return
        keyed = sorted((len(set(inst.m1.pairs) ^ set(m.pairs)), m.pairs) for m in stable)
        assert (result.diff, result.matching.pairs) == keyed[0]


def _circular_ok(profile, matching, c, d) -> bool:
    nc, nd = matching.partner(c), matching.partner(d)
    first = strictly_prefers(profile, c, nc, d) and strictly_prefers(profile, d, c, nd)
    second = strictly_prefers(profile, c, d, nc) and strictly_prefers(profile, d, nd, c)
    return first != second


@pytest.mark.parametrize("seed", range(60))
def test_circular_preferences(seed):
    """For a stable N and a stable pair {c,d} outside N, exactly one orientation holds."""
    rng = random.Random(4000 + seed)
    p = random_roommates(rng, rng.randint(2, 8), rng.uniform(0.4, 1.0))
    stable = enumerate_stable(p)
    if not stable:
        return
    pairs = stable_pairs(p)
    for m in stable:
        matched = m.matched_agents()
        for c, d in pairs:
            if (c, d) not in m and c in matched and d in matched:
                assert _circular_ok(p, m, c, d)


@pytest.mark.parametrize("seed", range(60))
def test_changed_agents_bound_pairs_leaving_m1(seed):
    """Pairs of M1 whose two ends both prefer their M2 partners are at most the changed agents."""
    rng = random.Random(5000 + seed)
    inst = random_incremental(rng, rng.choice([4, 6, 8]), complete=True, swaps=rng.randint(1, 2))
    if not enumerate_stable(inst.profile2):
        return
    red = perfectize(inst).instance
    changed = len(red.changed_agents())
    for m2 in enumerate_stable(red.profile2, max_agents=16):
        leaving = [
            (b, c)
            for b, c in red.m1.pairs
            if (b, c) not in m2
            and strictly_prefers(red.profile2, b, m2.partner(b), c)
            and strictly_prefers(red.profile2, c, m2.partner(c), b)
        ]
        assert len(leaving) <= changed
