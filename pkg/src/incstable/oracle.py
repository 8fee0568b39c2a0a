"""Exponential-time ground truth for small instances."""

from __future__ import annotations

from .model import (
    IncrementalInstance,
    Infeasible,
    InvalidArgument,
    Matching,
    Outcome,
    PreferenceProfile,
    ResourceLimit,
    Solution,
    diff_count,
    is_stable,
)

DEFAULT_MAX_AGENTS = 12


def enumerate_stable(
    profile: PreferenceProfile,
    max_agents: int = DEFAULT_MAX_AGENTS,
    limit: int | None = None,
) -> list[Matching]:
    """All weakly stable matchings, sorted by their pair lists.

    Backtracks over agents in id order, branching on each still-free
    acceptable partner and on leaving the agent unmatched. A branch is cut
    once a pair of finalized agents blocks. ``limit`` caps the number of
    matchings returned; exceeding it raises ``ResourceLimit``.
    """
    n = profile.n
    if n > max_agents:
        raise ResourceLimit(f"oracle bound exceeded: {n} agents > {max_agents}")
    ranks = profile._ranks
    tiers = [len(pl.tiers) for pl in profile.lists]
    acceptable = [
        sorted(b for b in ranks[a] if a in ranks[b]) for a in range(n)
    ]
    mate: list[int | None] = [None] * n
    decided = [False] * n
    found: list[Matching] = []

    def cur(a: int) -> int:
        m = mate[a]
        return tiers[a] if m is None else ranks[a][m]

    def blocks_with_decided(a: int) -> bool:
        ca = cur(a)
        for b in acceptable[a]:
            if decided[b] and ranks[a][b] < ca and ranks[b][a] < cur(b):
                return True
        return False

    def search(a: int) -> None:
        while a < n and decided[a]:
            a += 1
        if a == n:
            result = Matching((x, y) for x, y in enumerate(mate) if y is not None and x < y)
            found.append(result)
            if limit is not None and len(found) > limit:
                raise ResourceLimit(f"more than {limit} stable matchings")
            return
        for b in acceptable[a]:
            if decided[b]:
                continue
            mate[a], mate[b] = b, a
            decided[a] = decided[b] = True
            if not blocks_with_decided(a) and not blocks_with_decided(b):
                search(a + 1)
            decided[a] = decided[b] = False
            mate[a] = mate[b] = None
        decided[a] = True
        if not blocks_with_decided(a):
            search(a + 1)
        decided[a] = False

    search(0)
    found.sort()
    return found


def brute_force_incremental(
    instance: IncrementalInstance,
    max_agents: int = DEFAULT_MAX_AGENTS,
    limit: int | None = None,
) -> Outcome:
    """Stable matching of the second profile closest to ``m1``.

    Ties in distance go to the lexicographically least pair list.
    """
    if instance.profile1.n != instance.profile2.n:
        raise InvalidArgument("profiles over different agent sets")
    stable = enumerate_stable(instance.profile2, max_agents=max_agents, limit=limit)
    if not stable:
        return Infeasible()
    best = min(stable, key=lambda m: (diff_count(instance.m1, m), m.pairs))
    return Solution(best, diff_count(instance.m1, best), instance.k)


def all_matchings(profile: PreferenceProfile) -> list[Matching]:
    """Every matching over mutually acceptable pairs (no stability filter)."""
    n = profile.n
    out: list[Matching] = []
    mate: list[int | None] = [None] * n

    def rec(a: int) -> None:
        while a < n and mate[a] is not None:
            a += 1
        if a == n:
            out.append(Matching((x, y) for x, y in enumerate(mate) if y is not None and x < y))
            return
        mate[a] = -1
        rec(a + 1)
        for b in range(a + 1, n):
            if mate[b] is None and profile.mutually_accept(a, b):
                mate[a], mate[b] = b, a
                rec(a + 1)
                mate[b] = None
        mate[a] = None

    rec(0)
    return sorted(out)


def enumerate_stable_unpruned(profile: PreferenceProfile) -> list[Matching]:
    """Reference enumeration: filter every matching by ``is_stable``."""
    return [m for m in all_matchings(profile) if is_stable(profile, m)]
