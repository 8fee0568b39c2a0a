import random
from itertools import product

import pytest

from gen import profile_from, random_bipartite, random_complete, random_roommates
from incstable.classic import (
    find_stable_sm,
    find_stable_sr,
    force_pair,
    is_stable_pair,
    matched_set,
    max_weight_stable_marriage,
    stable_pairs,
)
from incstable.model import InvalidArgument, Matching, NoneExists, is_stable
from incstable.oracle import enumerate_stable

ODD_CYCLE = [[1, 2], [2, 0], [0, 1]]
FOUR_CYCLE = [[1, 3], [2, 0], [3, 1], [0, 2]]


class TestDeferredAcceptance:
    def test_single_pair(self):
        p = profile_from([[1], [0]], ([0], [1]))
        assert find_stable_sm(p) == Matching([(0, 1)])

    def test_identical_lists_give_assortative_matching(self):
        men = [[3, 4, 5]] * 3
        women = [[0, 1, 2]] * 3
        p = profile_from(men + women, ([0, 1, 2], [3, 4, 5]))
        result = find_stable_sm(p)
        assert result == Matching([(0, 3), (1, 4), (2, 5)])
        assert enumerate_stable(p) == [result]

    def test_rejects_roommates(self):
        with pytest.raises(InvalidArgument):
            find_stable_sm(profile_from(FOUR_CYCLE))

    @pytest.mark.parametrize("seed", range(40))
    def test_output_weakly_stable_with_ties(self, seed):
        rng = random.Random(seed)
        p = random_bipartite(rng, 4, 4, density=0.8, ties=3)
        assert is_stable(p, find_stable_sm(p))


class TestIrving:
    def test_odd_cycle_has_no_stable_matching(self):
        assert find_stable_sr(profile_from(ODD_CYCLE)) is None

    def test_four_cycle_solvable(self):
        result = find_stable_sr(profile_from(FOUR_CYCLE))
        assert result is not None and is_stable(profile_from(FOUR_CYCLE), result)

    def test_rejects_ties(self):
        with pytest.raises(InvalidArgument):
            find_stable_sr(profile_from([[(1, 2)], [0], [0]]))

    @pytest.mark.parametrize("seed", range(150))
    def test_existence_agrees_with_oracle(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 8)
        p = random_complete(rng, n) if seed % 2 else random_roommates(rng, n, rng.uniform(0.3, 1.0))
        result = find_stable_sr(p)
        stable = enumerate_stable(p)
        assert (result is None) == (not stable)
        if result is not None:
            assert result in stable


class TestStablePairs:
    def test_unique_matching_pairs(self):
        p = profile_from([[1], [0], [3], [2]])
        assert stable_pairs(p) == {(0, 1), (2, 3)}

    def test_four_cycle_all_edges_stable(self):
        assert stable_pairs(profile_from(FOUR_CYCLE)) == {(0, 1), (1, 2), (2, 3), (0, 3)}

    def test_no_stable_matching(self):
        with pytest.raises(NoneExists):
            stable_pairs(profile_from(ODD_CYCLE))

    def test_force_pair_keeps_only_the_pair(self):
        forced = force_pair(profile_from(FOUR_CYCLE), 0, 1)
        assert forced[0].order() == [1] and forced[1].order() == [0]
        assert not forced.violations()

    @pytest.mark.parametrize("seed", range(80))
    def test_union_of_oracle_matchings(self, seed):
        rng = random.Random(1000 + seed)
        n = rng.randint(2, 8)
        p = random_roommates(rng, n, rng.uniform(0.4, 1.0))
        stable = enumerate_stable(p)
        if not stable:
            with pytest.raises(NoneExists):
                stable_pairs(p)
            return
        union = {pair for m in stable for pair in m.pairs}
        assert stable_pairs(p) == union
        for pair in p.pairs():
            assert is_stable_pair(p, *pair) == (pair in union)


class TestRuralHospitals:
    def test_perfect_matching_covers_everyone(self):
        p = profile_from(FOUR_CYCLE)
        assert matched_set(p, Matching([(0, 1), (2, 3)])) == frozenset(range(4))

    def test_empty_instance(self):
        assert matched_set(profile_from([]), Matching()) == frozenset()

    @pytest.mark.parametrize("seed", range(60))
    def test_same_matched_set(self, seed):
        rng = random.Random(2000 + seed)
        p = random_roommates(rng, rng.randint(2, 8), rng.uniform(0.3, 0.9))
        sets = {matched_set(p, m) for m in enumerate_stable(p)}
        assert len(sets) <= 1


class TestWeightedMarriage:
    @pytest.mark.parametrize("seed", range(40))
    def test_maximizes_weight_over_all_stable(self, seed):
        rng = random.Random(3000 + seed)
        p = random_bipartite(rng, rng.randint(1, 4), rng.randint(1, 4), density=rng.uniform(0.5, 1.0))
        weights = {pair: float(rng.randint(0, 3)) for pair in p.pairs()}
        best = max_weight_stable_marriage(p, weights)
        assert is_stable(p, best)
        value = sum(weights[x] for x in best.pairs)
        assert value == max(sum(weights[x] for x in m.pairs) for m in enumerate_stable(p))

    def test_rejects_ties(self):
        p = random_bipartite(random.Random(0), 3, 3, ties=2)
        if not p.is_strict:
            with pytest.raises(InvalidArgument):
                max_weight_stable_marriage(p, {})

    def test_no_edges(self):
        p = profile_from([[], []], ([0], [1]))
        assert max_weight_stable_marriage(p, {}) == Matching()


@pytest.mark.parametrize("bits", list(product([0, 1], repeat=3)))
def test_find_stable_sr_on_all_three_agent_orders(bits):
    lists = [[1, 2], [2, 0], [0, 1]]
    p = profile_from([row if not b else row[::-1] for row, b in zip(lists, bits)])
    assert (find_stable_sr(p) is None) == (not enumerate_stable(p))
