"""Incremental stable marriage when the new profile has ties."""

from __future__ import annotations

from itertools import permutations, product
from typing import Iterator

from .classic import max_weight_stable_marriage
from .incremental import solve_ism
from .model import (
    UNMATCHED,
    IncrementalInstance,
    Infeasible,
    InvalidArgument,
    Matching,
    Outcome,
    PreferenceList,
    PreferenceProfile,
    ResourceLimit,
    Solution,
    diff_count,
    is_stable,
)

DEFAULT_MAX_TIED_AGENTS = 8
DEFAULT_MAX_TIE_SIZE = 8


def _require_bipartite(instance: IncrementalInstance) -> None:
    if instance.profile2.bipartition is None:
        raise InvalidArgument("tie-aware solvers need a bipartite instance")


def _partner_guesses(profile: PreferenceProfile, tied: list[int]) -> Iterator[dict[int, int | None]]:
    """Consistent partner choices for the tied agents; None stands for unmatched."""
    left, right = profile.bipartition
    own = {a: len(left if a in left else right) for a in range(profile.n)}
    opposite = {a: len(right if a in left else left) for a in range(profile.n)}
    tied_set = set(tied)
    chosen: dict[int, int | None] = {}
    used: set[int] = set()

    def rec(i: int) -> Iterator[dict[int, int | None]]:
        if i == len(tied):
            yield dict(chosen)
            return
        a = tied[i]
        if a in chosen:
            yield from rec(i + 1)
            return
        options: list[int | None] = sorted(b for b in profile[a].accepts if profile.accepts(b, a))
        # A complete list rules out staying single unless the own side is larger.
        if len(profile[a]) < opposite[a] or own[a] > opposite[a]:
            options.append(None)
        for b in options:
            if b is not None and (b in used or b in chosen):
                continue
            chosen[a] = b
            if b is not None:
                used.update((a, b))
                if b in tied_set:
                    chosen[b] = a
            yield from rec(i + 1)
            if b is not None:
                used.difference_update((a, b))
                if b in tied_set:
                    del chosen[b]
            del chosen[a]

    yield from rec(0)


def solve_ismt_xp(
    instance: IncrementalInstance, max_tied: int = DEFAULT_MAX_TIED_AGENTS
) -> Outcome:
    """Guess the partners of agents with ties, then solve the rest as weighted stable marriage."""
    _require_bipartite(instance)
    p2 = instance.profile2
    tied = p2.tied_agents()
    if len(tied) > max_tied:
        raise ResourceLimit(f"{len(tied)} agents with ties exceed the bound {max_tied}")
    best: tuple[int, tuple] | None = None
    best_matching: Matching | None = None
    for guess in _partner_guesses(p2, tied):
        fixed = dict(guess)
        for a, b in guess.items():
            if b is not None:
                fixed[b] = a
        rest = [b for b in range(p2.n) if b not in fixed]
        rest_set = set(rest)
        allowed = {b: set(p2[b].accepts) & rest_set for b in rest}
        for a, partner in fixed.items():
            current = p2.rank(a, UNMATCHED if partner is None else partner)
            for b in p2[a].accepts:
                if b in rest_set and p2.rank(a, b) < current:
                    # b must end up strictly better than a, or {a, b} blocks.
                    cut = p2.rank(b, a)
                    for other in list(allowed[b]):
                        if p2.rank(b, other) > cut:
                            allowed[b].discard(other)
                            allowed[other].discard(b)
        lists = []
        for x in range(p2.n):
            if x in rest_set:
                lists.append(PreferenceList.strict(y for y in p2[x].order() if y in allowed[x]))
            else:
                lists.append(PreferenceList())
        reduced = PreferenceProfile(lists, p2.bipartition)
        weights = {p: 1.0 for p in instance.m1 if p[0] in rest_set and p[1] in rest_set and reduced.mutually_accept(*p)}
        inner = max_weight_stable_marriage(reduced, weights)
        pairs = list(inner.pairs) + [(a, b) for a, b in fixed.items() if b is not None and a < b]
        candidate = Matching(pairs)
        if not is_stable(p2, candidate):
            continue
        key = (diff_count(instance.m1, candidate), candidate.pairs)
        if best is None or key < best:
            best, best_matching = key, candidate
    if best_matching is None:
        return Infeasible()
    return Solution(best_matching, best[0], instance.k)


def linearizations(profile: PreferenceProfile) -> Iterator[PreferenceProfile]:
    """Every way of breaking the ties: agents by id, each tie's orders lexicographically."""
    per_agent = []
    for a in range(profile.n):
        choices = [list(permutations(t)) for t in profile[a].tiers]
        per_agent.append([tuple(x for part in combo for x in part) for combo in product(*choices)])
    for orders in product(*per_agent):
        yield PreferenceProfile([PreferenceList.strict(o) for o in orders], profile.bipartition)


def solve_ismt_tiebreak(
    instance: IncrementalInstance, max_tie_size: int = DEFAULT_MAX_TIE_SIZE
) -> Outcome:
    """Try every linearization of the new profile and keep the closest stable matching."""
    _require_bipartite(instance)
    p2 = instance.profile2
    total = sum(pl.tie_size_sum for pl in p2.lists)
    if total > max_tie_size:
        raise ResourceLimit(f"summed tie size {total} exceeds the bound {max_tie_size}")
    best: tuple[int, tuple] | None = None
    best_matching: Matching | None = None
    for strict in linearizations(p2):
        result = solve_ism(IncrementalInstance(instance.profile1, strict, instance.m1, instance.k))
        key = (result.diff, result.matching.pairs)
        if best is None or key < best:
            best, best_matching = key, result.matching
    assert best_matching is not None
    return Solution(best_matching, best[0], instance.k)
