"""Solvers for profiles derived from master lists, with or without a few outliers."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .model import (
    IncrementalInstance,
    Infeasible,
    InvalidArgument,
    Matching,
    Outcome,
    Pair,
    PreferenceProfile,
    ResourceLimit,
    Solution,
    diff_count,
    is_stable,
    norm_pair,
)

DEFAULT_MAX_OUTLIERS = 8


@dataclass(frozen=True)
class MasterList:
    """A weak order over agents; ``tiers[0]`` is the most preferred class."""

    tiers: tuple[tuple[int, ...], ...]

    @property
    def strict(self) -> bool:
        return all(len(t) == 1 for t in self.tiers)

    def order(self) -> list[int]:
        return [a for t in self.tiers for a in t]

    def position(self) -> dict[int, int]:
        return {a: i for i, t in enumerate(self.tiers) for a in t}

    def derives(self, profile: PreferenceProfile, agent: int) -> bool:
        """True iff the agent's list is this order restricted to its accepted agents."""
        accepted = profile[agent].accepts
        restricted = [tuple(x for x in t if x in accepted) for t in self.tiers]
        return tuple(t for t in restricted if t) == profile[agent].tiers


def detect_master_lists(
    profile: PreferenceProfile, agents: Iterable[int] | None = None
) -> MasterList | None:
    """A master list from which every listed agent's preferences derive, or None.

    Ties merge agents into one class and consecutive tiers order classes.
    The classes are then sorted topologically, breaking ties by smallest id.
    """
    chosen = range(profile.n) if agents is None else sorted(set(agents))
    parent = list(range(profile.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in chosen:
        for tier in profile[a].tiers:
            for x in tier[1:]:
                parent[find(x)] = find(tier[0])
    above: dict[int, set[int]] = {}
    for a in chosen:
        tiers = profile[a].tiers
        for upper, lower in zip(tiers, tiers[1:]):
            u, w = find(upper[0]), find(lower[0])
            if u == w:
                return None
            above.setdefault(w, set()).add(u)
    members: dict[int, list[int]] = {}
    for x in range(profile.n):
        members.setdefault(find(x), []).append(x)
    pending = {r: set(above.get(r, ())) for r in members}
    tiers: list[tuple[int, ...]] = []
    while pending:
        ready = [r for r, deps in pending.items() if not deps]
        if not ready:
            return None
        root = min(ready, key=lambda r: min(members[r]))
        tiers.append(tuple(sorted(members[root])))
        del pending[root]
        for deps in pending.values():
            deps.discard(root)
    master = MasterList(tuple(tiers))
    if not all(master.derives(profile, a) for a in chosen):
        return None
    return master


def follower_partition(profile: PreferenceProfile, master: MasterList) -> "OutlierPartition":
    """Split agents into those whose complete lists follow ``master`` and the rest."""
    everyone = set(range(profile.n))
    followers = [
        a
        for a in range(profile.n)
        if profile[a].accepts == everyone - {a} and master.derives(profile, a)
    ]
    outliers = sorted(everyone - set(followers))
    return OutlierPartition(tuple(followers), tuple(outliers), master)


# ---------------------------------------------------------------------------
# Strict master list


def stable_from_strict_master(profile: PreferenceProfile, master: Sequence[int]) -> Matching:
    """Walk the master list, matching each free agent to its best free acceptable agent."""
    mate: dict[int, int] = {}
    for a in master:
        if a in mate:
            continue
        for b in profile[a].order():
            if b not in mate and profile.accepts(b, a):
                mate[a], mate[b] = b, a
                break
    return Matching.from_mates(mate)


def solve_strict_master_list(instance: IncrementalInstance) -> Outcome:
    p2 = instance.profile2
    if not p2.is_strict:
        raise InvalidArgument("strict master list solver needs strict preferences")
    master = detect_master_lists(p2)
    if master is None or not master.strict:
        raise InvalidArgument("preferences are not derived from one strict master list")
    found = stable_from_strict_master(p2, master.order())
    return Solution(found, diff_count(instance.m1, found), instance.k)


# ---------------------------------------------------------------------------
# Weak master list, complete preferences


def _pair_up(agents: Sequence[int]) -> list[Pair]:
    return [norm_pair(agents[i], agents[i + 1]) for i in range(0, len(agents) - 1, 2)]


def weak_master_matching(
    classes: Sequence[Sequence[int]], m1: Matching
) -> tuple[Matching, list[str]]:
    """Class-by-class construction of the stable matching closest to ``m1``.

    Returns the matching and the case taken for every class.
    """
    mate = m1.mate_map()
    pairs: list[Pair] = []
    cases: list[str] = []
    carry: int | None = None

    def keep_initial(group: set[int]) -> list[int]:
        """Add initial pairs inside ``group``; return the agents left over."""
        covered: set[int] = set()
        for a in sorted(group):
            b = mate.get(a)
            if b is not None and b in group and a < b:
                pairs.append((a, b))
                covered.update((a, b))
        return sorted(group - covered)

    for i, members in enumerate(classes):
        here = set(members)
        following = set(classes[i + 1]) if i + 1 < len(classes) else set()
        group = here | ({carry} if carry is not None else set())
        if len(group) % 2 == 0:
            cases.append("1")
            pairs.extend(_pair_up(keep_initial(group)))
            carry = None
            continue
        straddling = sorted(b for b in here if mate.get(b) in following)
        if straddling:
            cases.append("2a")
            chosen = straddling[0]
            pairs.extend(_pair_up(keep_initial(group - {chosen})))
            carry = chosen
        elif all(mate.get(b) in here for b in here):
            cases.append("2b")
            inner = sorted(norm_pair(b, mate[b]) for b in here if b < mate[b])
            first, second = inner[0]
            pairs.extend(inner[1:])
            assert carry is not None
            pairs.append(norm_pair(carry, first))
            carry = second
        else:
            cases.append("2c")
            rest = keep_initial(group)
            if carry is not None and carry in rest:
                rest = [carry] + [b for b in rest if b != carry]
            pairs.extend(_pair_up(rest))
            carry = rest[-1]
    return Matching(pairs), cases


def boundary_violations(classes: Sequence[Sequence[int]], matching: Matching) -> list[str]:
    """Check the parity structure every stable matching of a complete weak-master-list profile has."""
    where = {a: i for i, members in enumerate(classes) for a in members}
    problems = []
    for a, b in matching:
        if abs(where[a] - where[b]) > 1:
            problems.append(f"pair {a}-{b} skips a class")
    prefix = 0
    for i, members in enumerate(classes):
        before = prefix
        prefix += len(members)
        down = sum(1 for a in members if matching.is_matched(a) and where[matching.partner(a)] == i - 1)
        up = sum(
            1
            for a in members
            if (matching.is_matched(a) and where[matching.partner(a)] == i + 1)
            or (not matching.is_matched(a) and i == len(classes) - 1)
        )
        stray = sum(1 for a in members if not matching.is_matched(a) and i != len(classes) - 1)
        if down != before % 2:
            problems.append(f"class {i}: {down} agents matched to the previous class")
        if up != prefix % 2:
            problems.append(f"class {i}: {up} agents matched to the next class or left single")
        if stray:
            problems.append(f"class {i}: {stray} agents single before the last class")
    return problems


def solve_weak_master_list_complete(instance: IncrementalInstance) -> Outcome:
    p2 = instance.profile2
    if p2.is_bipartite:
        raise InvalidArgument("the weak master list solver treats roommates profiles only")
    if not p2.is_complete():
        raise InvalidArgument("the weak master list solver needs complete preferences")
    master = detect_master_lists(p2)
    if master is None:
        raise InvalidArgument("preferences are not derived from one weak master list")
    found, _ = weak_master_matching(master.tiers, instance.m1)
    return Solution(found, diff_count(instance.m1, found), instance.k)


# ---------------------------------------------------------------------------
# Few outliers


@dataclass(frozen=True)
class OutlierPartition:
    """Followers share a strict master list; outliers may rank arbitrarily."""

    followers: tuple[int, ...]
    outliers: tuple[int, ...]
    master: MasterList


def outlier_partition(profile: PreferenceProfile, outliers: Iterable[int]) -> OutlierPartition:
    """Validate a proposed outlier set and derive the followers' master list."""
    outliers = tuple(sorted(set(outliers)))
    if any(not 0 <= s < profile.n for s in outliers):
        raise InvalidArgument("unknown outlier agent")
    if not profile.is_strict:
        raise InvalidArgument("outlier enumeration needs strict preferences")
    if not profile.is_complete():
        raise InvalidArgument("outlier enumeration needs complete preferences for every agent")
    followers = tuple(a for a in range(profile.n) if a not in outliers)
    master = detect_master_lists(profile, followers)
    if master is None or not master.strict:
        raise InvalidArgument("followers do not share one strict master list")
    return OutlierPartition(followers, outliers, master)


def _pairings(agents: Sequence[int], profile: PreferenceProfile) -> Iterator[list[Pair]]:
    if not agents:
        yield []
        return
    first, rest = agents[0], agents[1:]
    for i, other in enumerate(rest):
        if profile.mutually_accept(first, other):
            for tail in _pairings(rest[:i] + rest[i + 1 :], profile):
                yield [(first, other)] + tail


def _greedy_with_outliers(
    profile: PreferenceProfile, partition: OutlierPartition, fixed: list[Pair]
) -> Matching:
    outliers = set(partition.outliers)
    mate: dict[int, int] = {}
    for a, b in fixed:
        mate[a], mate[b] = b, a
    order = [a for a in partition.master.order() if a not in mate]
    done: set[int] = set()

    def favourite_follower(agent: int, taken: dict[int, int]) -> int | None:
        for b in profile[agent].order():
            if b not in outliers and b not in taken:
                return b
        return None

    for _ in range(len(order) + 1):
        free = [a for a in order if a not in mate and a not in done]
        if len(free) < 2:
            break
        a = free[0]
        if a in outliers:
            b = favourite_follower(a, mate)
            if b is None:
                done.add(a)
            else:
                mate[a], mate[b] = b, a
            continue
        later = free[1:]
        nxt = next((i for i, b in enumerate(later) if b not in outliers), None)
        between = later if nxt is None else later[:nxt]
        temp = dict(mate)
        for b in between:
            if b in temp:
                continue
            best = favourite_follower(b, temp)
            if best is not None:
                temp[b], temp[best] = best, b
        if a in temp or nxt is None:
            mate = temp
            if a not in mate:
                done.add(a)
        else:
            partner = later[nxt]
            mate[a], mate[partner] = partner, a
    return Matching.from_mates(mate)


def iter_outlier_guesses(
    profile: PreferenceProfile,
    partition: OutlierPartition,
    max_outliers: int = DEFAULT_MAX_OUTLIERS,
) -> Iterator[tuple[tuple[int, ...], tuple[Pair, ...], Matching | None]]:
    """Each guess (outliers paired among themselves, their pairing) with its stable matching or None."""
    outliers = list(partition.outliers)
    if len(outliers) > max_outliers:
        raise ResourceLimit(f"{len(outliers)} outliers exceed the bound {max_outliers}")
    for mask in range(1 << len(outliers)):
        chosen = [s for i, s in enumerate(outliers) if mask >> i & 1]
        if len(chosen) % 2:
            continue
        for pairing in _pairings(chosen, profile):
            found = _greedy_with_outliers(profile, partition, pairing)
            yield tuple(chosen), tuple(pairing), (found if is_stable(profile, found) else None)


def enumerate_with_outliers(
    profile: PreferenceProfile,
    partition: OutlierPartition,
    max_outliers: int = DEFAULT_MAX_OUTLIERS,
) -> list[Matching]:
    """All stable matchings, at most one per guess."""
    found = {m for _, _, m in iter_outlier_guesses(profile, partition, max_outliers) if m is not None}
    return sorted(found)


def outlier_guess_of(partition: OutlierPartition, matching: Matching) -> tuple[tuple[int, ...], tuple[Pair, ...]]:
    """The guess a stable matching respects."""
    outliers = set(partition.outliers)
    pairs = tuple(p for p in matching if p[0] in outliers and p[1] in outliers)
    chosen = tuple(sorted(x for p in pairs for x in p))
    return chosen, pairs


def solve_isr_outliers(
    instance: IncrementalInstance,
    partition: OutlierPartition | None = None,
    max_outliers: int = DEFAULT_MAX_OUTLIERS,
) -> Outcome:
    p2 = instance.profile2
    if partition is None:
        master = detect_master_lists(p2)
        if master is None or not master.strict:
            raise InvalidArgument("no outlier set given and no strict master list found")
        partition = follower_partition(p2, master)
    stable = enumerate_with_outliers(p2, partition, max_outliers)
    if not stable:
        return Infeasible()
    best = min(stable, key=lambda m: (diff_count(instance.m1, m), m.pairs))
    return Solution(best, diff_count(instance.m1, best), instance.k)
