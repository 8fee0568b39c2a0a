"""Core data model: weak preference orders, matchings, stability, distances."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union


class InvalidArgument(ValueError):
    """Input violates a documented precondition."""


class ResourceLimit(RuntimeError):
    """An enumeration would exceed its configured bound."""


class NoneExists(Exception):
    """The profile admits no stable matching."""


class InternalError(RuntimeError):
    """A guard that should be unreachable fired; indicates a solver bug."""


class _UnmatchedType:
    _instance: "_UnmatchedType | None" = None

    def __new__(cls) -> "_UnmatchedType":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Unmatched"

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return (_UnmatchedType, ())


UNMATCHED = _UnmatchedType()
"""Partner value of an agent without a partner; ranked below every accepted agent."""

INFINITE = math.inf

Partner = Union[int, _UnmatchedType]
Pair = tuple[int, int]


def norm_pair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


class PreferenceList:
    """A weak order over accepted agents, stored as tiers (tier 0 is best)."""

    __slots__ = ("tiers", "_rank")

    def __init__(self, tiers: Iterable[Iterable[int]] = ()):
        normalized = []
        rank: dict[int, int] = {}
        for t, tier in enumerate(tiers):
            raw = list(tier)
            members = tuple(sorted(set(raw)))
            if len(members) != len(raw):
                raise InvalidArgument("agent repeated inside one tie")
            if not members:
                raise InvalidArgument("empty tier in preference list")
            for x in members:
                if x in rank:
                    raise InvalidArgument(f"agent {x} appears twice in one list")
                rank[x] = t
            normalized.append(members)
        self.tiers: tuple[tuple[int, ...], ...] = tuple(normalized)
        self._rank = rank

    @classmethod
    def strict(cls, order: Iterable[int]) -> "PreferenceList":
        return cls((x,) for x in order)

    @classmethod
    def from_spec(cls, items: Iterable[Union[int, Iterable[int]]]) -> "PreferenceList":
        """Build from a mix of ids (singleton tiers) and iterables (ties)."""
        return cls((x,) if isinstance(x, int) else tuple(x) for x in items)

    @property
    def accepts(self) -> frozenset[int]:
        return frozenset(self._rank)

    def __contains__(self, x: object) -> bool:
        return x in self._rank

    def __len__(self) -> int:
        return len(self._rank)

    def rank(self, x: Partner) -> int | None:
        """Tier index of ``x``; Unmatched ranks after the last tier; None if unaccepted."""
        if x is UNMATCHED:
            return len(self.tiers)
        return self._rank.get(x)  # type: ignore[arg-type]

    def order(self) -> list[int]:
        """Agents from best to worst, ties broken by ascending id."""
        return [x for tier in self.tiers for x in tier]

    @property
    def is_strict(self) -> bool:
        return all(len(t) == 1 for t in self.tiers)

    @property
    def tie_count(self) -> int:
        return sum(1 for t in self.tiers if len(t) >= 2)

    @property
    def tie_size_sum(self) -> int:
        return sum(len(t) for t in self.tiers if len(t) >= 2)

    def without(self, drop: Iterable[int]) -> "PreferenceList":
        gone = set(drop)
        return PreferenceList(
            kept for kept in ([x for x in t if x not in gone] for t in self.tiers) if kept
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PreferenceList) and self.tiers == other.tiers

    def __hash__(self) -> int:
        return hash(self.tiers)

    def __repr__(self) -> str:
        parts = [str(t[0]) if len(t) == 1 else "(" + " ".join(map(str, t)) + ")" for t in self.tiers]
        return "PreferenceList[" + " > ".join(parts) + "]"


@dataclass(frozen=True)
class Violation:
    """One problem found while validating an instance."""

    kind: str
    location: tuple
    message: str
    fatal: bool = True

    def __str__(self) -> str:
        return f"{self.message} at {self.location}"


class PreferenceProfile:
    """Preference lists for agents ``0..n-1`` with an optional bipartition."""

    __slots__ = ("lists", "bipartition", "_ranks")

    def __init__(
        self,
        lists: Sequence[Union[PreferenceList, Sequence]],
        bipartition: tuple[Iterable[int], Iterable[int]] | None = None,
    ):
        built = tuple(
            pl if isinstance(pl, PreferenceList) else PreferenceList.from_spec(pl) for pl in lists
        )
        n = len(built)
        for a, pl in enumerate(built):
            for x in pl.accepts:
                if not (0 <= x < n):
                    raise InvalidArgument(f"agent {a} lists unknown agent {x}")
                if x == a:
                    raise InvalidArgument(f"agent {a} lists itself")
        self.lists: tuple[PreferenceList, ...] = built
        self._ranks = tuple(pl._rank for pl in built)
        if bipartition is not None:
            left, right = frozenset(bipartition[0]), frozenset(bipartition[1])
            if left & right or (left | right) != frozenset(range(n)):
                raise InvalidArgument("bipartition must split the agents into two disjoint sides")
            self.bipartition: tuple[frozenset[int], frozenset[int]] | None = (left, right)
        else:
            self.bipartition = None

    @property
    def n(self) -> int:
        return len(self.lists)

    def __len__(self) -> int:
        return len(self.lists)

    def __getitem__(self, a: int) -> PreferenceList:
        return self.lists[a]

    def _check(self, a: int) -> None:
        if not isinstance(a, int) or not (0 <= a < len(self.lists)):
            raise InvalidArgument(f"unknown agent {a!r}")

    def rank(self, a: int, x: Partner) -> int | None:
        return self.lists[a].rank(x)

    def accepts(self, a: int, b: int) -> bool:
        return b in self._ranks[a]

    def mutually_accept(self, a: int, b: int) -> bool:
        return b in self._ranks[a] and a in self._ranks[b]

    @property
    def is_strict(self) -> bool:
        return all(pl.is_strict for pl in self.lists)

    @property
    def is_bipartite(self) -> bool:
        return self.bipartition is not None

    def is_complete(self) -> bool:
        """Every agent accepts every other agent (roommates sense)."""
        n = len(self.lists)
        return all(len(pl) == n - 1 for pl in self.lists)

    def is_bipartite_complete(self) -> bool:
        if self.bipartition is None:
            return False
        left, right = self.bipartition
        return all(
            self.lists[a].accepts == (right if a in left else left) for a in range(self.n)
        )

    def tied_agents(self) -> list[int]:
        return [a for a, pl in enumerate(self.lists) if not pl.is_strict]

    def tie_signature(self) -> tuple[int, ...]:
        """Sorted multiset of tie sizes over all agents."""
        return tuple(sorted(len(t) for pl in self.lists for t in pl.tiers if len(t) >= 2))

    def pairs(self) -> list[Pair]:
        """All mutually acceptable pairs, lexicographically."""
        return [
            (a, b)
            for a in range(self.n)
            for b in sorted(self._ranks[a])
            if a < b and a in self._ranks[b]
        ]

    def side(self, a: int) -> int | None:
        if self.bipartition is None:
            return None
        return 0 if a in self.bipartition[0] else 1

    def with_lists(self, updates: dict[int, PreferenceList]) -> "PreferenceProfile":
        lists = list(self.lists)
        for a, pl in updates.items():
            lists[a] = pl
        return PreferenceProfile(lists, self.bipartition)

    def violations(self) -> list[Violation]:
        found = []
        for a in range(self.n):
            for b in sorted(self._ranks[a]):
                if a not in self._ranks[b]:
                    found.append(
                        Violation("asymmetric", (a, b), f"agent {a} accepts {b} but not vice versa")
                    )
        if self.bipartition is not None:
            left, right = self.bipartition
            for a in range(self.n):
                own = left if a in left else right
                bad = sorted(self._ranks[a].keys() & own)
                if bad:
                    found.append(
                        Violation("bipartition", (a, bad[0]), f"agent {a} accepts same-side agent {bad[0]}")
                    )
        return found

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PreferenceProfile)
            and self.lists == other.lists
            and self.bipartition == other.bipartition
        )

    def __hash__(self) -> int:
        return hash((self.lists, self.bipartition))

    def __repr__(self) -> str:
        return f"PreferenceProfile(n={self.n}, bipartite={self.is_bipartite})"


class Matching:
    """An immutable set of disjoint unordered agent pairs."""

    __slots__ = ("_mate", "pairs")

    def __init__(self, pairs: Iterable[Sequence[int]] = ()):
        mate: dict[int, int] = {}
        normalized = []
        for pair in pairs:
            a, b = pair
            if a == b:
                raise InvalidArgument(f"agent {a} cannot be matched to itself")
            if a in mate or b in mate:
                raise InvalidArgument(f"pair ({a}, {b}) overlaps another pair")
            mate[a] = b
            mate[b] = a
            normalized.append(norm_pair(a, b))
        self._mate = mate
        self.pairs: tuple[Pair, ...] = tuple(sorted(normalized))

    @classmethod
    def from_mates(cls, mate: dict[int, int]) -> "Matching":
        return cls((a, b) for a, b in mate.items() if a < b)

    def partner(self, a: int) -> Partner:
        return self._mate.get(a, UNMATCHED)

    def mate_map(self) -> dict[int, int]:
        return dict(self._mate)

    def is_matched(self, a: int) -> bool:
        return a in self._mate

    def matched_agents(self) -> frozenset[int]:
        return frozenset(self._mate)

    def __contains__(self, pair: object) -> bool:
        try:
            a, b = pair  # type: ignore[misc]
        except (TypeError, ValueError):
            return False
        return self._mate.get(a) == b

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Matching) and self.pairs == other.pairs

    def __lt__(self, other: "Matching") -> bool:
        return self.pairs < other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def __repr__(self) -> str:
        return f"Matching({list(self.pairs)})"


@dataclass(frozen=True)
class IncrementalInstance:
    """Two profiles over the same agents, a matching stable in the first, and a budget."""

    profile1: PreferenceProfile
    profile2: PreferenceProfile
    m1: Matching
    k: int
    forced: frozenset[Pair] = field(default_factory=frozenset)
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "forced", frozenset(norm_pair(*p) for p in self.forced))
        if self.names is not None and len(self.names) != self.profile1.n:
            raise InvalidArgument("one name per agent required")

    @property
    def n(self) -> int:
        return self.profile1.n

    def name(self, a: int) -> str:
        return self.names[a] if self.names is not None else str(a)

    def agent_names(self) -> tuple[str, ...]:
        return self.names if self.names is not None else tuple(str(a) for a in range(self.n))

    def changed_agents(self) -> list[int]:
        return [a for a in range(self.n) if self.profile1[a] != self.profile2[a]]


@dataclass(frozen=True)
class Solution:
    """A stable matching in the second profile together with its distance to ``m1``."""

    matching: Matching
    diff: int
    k: int

    @property
    def within_budget(self) -> bool:
        return self.diff <= self.k

    feasible = True


@dataclass(frozen=True)
class Infeasible:
    """No stable matching exists in the second profile."""

    reason: str = "no stable matching"

    feasible = False


Outcome = Union[Solution, Infeasible]


def weakly_prefers(profile: PreferenceProfile, a: int, x: Partner, y: Partner) -> bool:
    """True iff agent ``a`` ranks ``x`` at least as high as ``y``."""
    profile._check(a)
    rx, ry = profile.rank(a, x), profile.rank(a, y)
    if rx is None or ry is None:
        raise InvalidArgument(f"agent {a} does not accept {x if rx is None else y}")
    return rx <= ry


def strictly_prefers(profile: PreferenceProfile, a: int, x: Partner, y: Partner) -> bool:
    profile._check(a)
    rx, ry = profile.rank(a, x), profile.rank(a, y)
    if rx is None or ry is None:
        raise InvalidArgument(f"agent {a} does not accept {x if rx is None else y}")
    return rx < ry


def _partner_rank(ranks: dict[int, int], tiers: int, partner: int | None) -> int:
    if partner is None:
        return tiers
    r = ranks.get(partner)
    if r is None:
        raise InvalidArgument(f"matched to unaccepted agent {partner}")
    return r


def is_blocking(profile: PreferenceProfile, matching: Matching, a: int, b: int) -> bool:
    """Both agents accept each other and each strictly prefers the other to its partner."""
    profile._check(a)
    profile._check(b)
    if a == b:
        raise InvalidArgument("a blocking pair needs two distinct agents")
    ra, rb = profile._ranks[a], profile._ranks[b]
    if b not in ra or a not in rb:
        return False
    mate = matching._mate
    if mate.get(a) == b:
        return False
    return ra[b] < _partner_rank(ra, len(profile.lists[a].tiers), mate.get(a)) and rb[a] < _partner_rank(
        rb, len(profile.lists[b].tiers), mate.get(b)
    )


def blocking_pairs(profile: PreferenceProfile, matching: Matching) -> list[Pair]:
    """All blocking pairs, lexicographically ordered."""
    return blocking_pairs_of(profile, matching._mate)


def blocking_pairs_of(profile: PreferenceProfile, mate: dict[int, int]) -> list[Pair]:
    ranks = profile._ranks
    cur = [
        _partner_rank(ranks[a], len(profile.lists[a].tiers), mate.get(a)) for a in range(profile.n)
    ]
    out = []
    for a in range(profile.n):
        ra = ranks[a]
        ca = cur[a]
        for b, r in ra.items():
            if b > a and r < ca:
                rb = ranks[b].get(a)
                if rb is not None and rb < cur[b]:
                    out.append((a, b))
    out.sort()
    return out


def has_blocking_pair(profile: PreferenceProfile, mate: dict[int, int]) -> bool:
    ranks = profile._ranks
    cur = [
        _partner_rank(ranks[a], len(profile.lists[a].tiers), mate.get(a)) for a in range(profile.n)
    ]
    for a in range(profile.n):
        ca = cur[a]
        for b, r in ranks[a].items():
            if r < ca:
                rb = ranks[b].get(a)
                if rb is not None and rb < cur[b]:
                    return True
    return False


def is_valid_matching(profile: PreferenceProfile, matching: Matching) -> bool:
    return all(profile.mutually_accept(a, b) for a, b in matching.pairs)


def is_stable(profile: PreferenceProfile, matching: Matching) -> bool:
    """No blocking pair exists (weak stability under ties)."""
    if not is_valid_matching(profile, matching):
        raise InvalidArgument("matching contains a pair that is not mutually acceptable")
    return not has_blocking_pair(profile, matching._mate)


def symmetric_difference(m1: Matching, m2: Matching) -> tuple[frozenset[Pair], int]:
    diff = frozenset(m1.pairs).symmetric_difference(m2.pairs)
    return diff, len(diff)


def diff_count(m1: Matching, m2: Matching) -> int:
    return len(set(m1.pairs).symmetric_difference(m2.pairs))


def list_swap_distance(p: PreferenceList, q: PreferenceList) -> float:
    """Unordered pairs of accepted agents whose comparison differs; infinite if acceptance differs."""
    if p.accepts != q.accepts:
        return INFINITE
    total = 0
    for x, y in combinations(sorted(p.accepts), 2):
        px, py = p._rank[x], p._rank[y]
        qx, qy = q._rank[x], q._rank[y]
        if (px > py) - (px < py) != (qx > qy) - (qx < qy):
            total += 1
    return total


def swap_distance(p1: PreferenceProfile, p2: PreferenceProfile) -> Union[int, float]:
    """Summed per-agent swap distance, or ``INFINITE``."""
    if p1.n != p2.n:
        raise InvalidArgument("profiles over different agent sets")
    total: Union[int, float] = 0
    for a in range(p1.n):
        total += list_swap_distance(p1[a], p2[a])
    return total


def validate_instance(instance: IncrementalInstance) -> list[Violation]:
    """Every problem with the instance; an empty list means it is valid."""
    found: list[Violation] = []
    p1, p2 = instance.profile1, instance.profile2
    if p1.n != p2.n:
        return [Violation("agents", (), "profiles have different agent counts")]
    if p1.bipartition != p2.bipartition:
        found.append(Violation("bipartition", (), "profiles disagree on the bipartition"))
    for label, prof in (("P1", p1), ("P2", p2)):
        for v in prof.violations():
            found.append(Violation(v.kind, (label,) + v.location, f"{label}: {v.message}"))
    for a, b in instance.m1.pairs:
        if max(a, b) >= p1.n:
            found.append(Violation("matching", (a, b), "initial matching names an unknown agent"))
        elif not p1.mutually_accept(a, b):
            found.append(Violation("matching", (a, b), "initial matching pair not mutually acceptable"))
    if not found:
        bp = blocking_pairs(p1, instance.m1)
        if bp:
            found.append(Violation("unstable", bp[0], "initial matching unstable"))
    for pair in sorted(instance.forced):
        if pair not in instance.m1:
            found.append(Violation("forced", pair, "forced pair not in initial matching"))
    if instance.k < 0:
        found.append(Violation("budget", (), "budget must be non-negative"))
    for a in range(p1.n):
        if p1[a].accepts != p2[a].accepts:
            found.append(
                Violation("acceptance", (a,), "acceptance sets differ; swap distance is infinite", fatal=False)
            )
    return found


def require_valid(instance: IncrementalInstance) -> None:
    fatal = [v for v in validate_instance(instance) if v.fatal]
    if fatal:
        raise InvalidArgument("; ".join(str(v) for v in fatal))
