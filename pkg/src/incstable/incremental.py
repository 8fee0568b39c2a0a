"""Exact incremental solvers for strict preferences.

``solve_ism`` handles the bipartite case through a weighted stable
marriage program. ``solve_isr_xp`` is the guess-and-propagate algorithm
for roommates: after reducing to an instance where the initial matching and
every stable matching of the new profile are perfect, it guesses how the
agents around the change are matched and then repairs blocking pairs while
tracking, for each agent, the best and worst partner it can still receive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Callable, Iterator

from .classic import find_stable_sr, max_weight_stable_marriage, stable_pairs
from .model import (
    IncrementalInstance,
    Infeasible,
    InternalError,
    InvalidArgument,
    Matching,
    NoneExists,
    Outcome,
    Pair,
    PreferenceList,
    PreferenceProfile,
    ResourceLimit,
    Solution,
    blocking_pairs_of,
    diff_count,
    is_stable,
    norm_pair,
)

DEFAULT_GUESS_LIMIT = 10**7


def solve_ism(instance: IncrementalInstance) -> Outcome:
    """Stable marriage of the new profile sharing the most pairs with ``m1``.

    All stable matchings of a strict marriage instance match the same agents,
    so maximizing the overlap with ``m1`` minimizes the symmetric difference.
    """
    p2 = instance.profile2
    if p2.bipartition is None:
        raise InvalidArgument("solve_ism needs a bipartite instance")
    if not p2.is_strict:
        raise InvalidArgument("solve_ism needs strict preferences")
    weights = {p: 1.0 for p in instance.m1 if p2.mutually_accept(*p)}
    best = max_weight_stable_marriage(p2, weights)
    return Solution(best, diff_count(instance.m1, best), instance.k)


# ---------------------------------------------------------------------------
# Reduction to perfect matchings


@dataclass(frozen=True)
class Perfectized:
    """An equivalent instance where ``m1`` is perfect and the new profile has a perfect stable matching.

    ``pendants`` maps each agent left single by the new profile to the agent
    added as its last resort. ``dummies`` lists the pairs (agent, dummy) that
    complete ``m1``. The optimal distance grows by exactly ``shift``.
    """

    instance: IncrementalInstance
    original_n: int
    unmatched_before: frozenset[int]
    unmatched_after: frozenset[int]
    pendants: dict[int, int]
    dummies: tuple[Pair, ...]
    pendant_shift: int
    dummy_shift: int

    @property
    def shift(self) -> int:
        return self.pendant_shift + self.dummy_shift

    @property
    def x(self) -> int:
        return len(self.dummies)

    def translate(self, matching: Matching) -> Matching:
        """Drop every pair that involves an added agent."""
        return Matching(p for p in matching if p[1] < self.original_n)


def perfectize(instance: IncrementalInstance) -> Perfectized:
    """Add pendant and dummy agents so that both matchings of interest are perfect."""
    p1, p2 = instance.profile1, instance.profile2
    if not (p1.is_strict and p2.is_strict):
        raise InvalidArgument("perfectize needs strict preferences")
    reference = find_stable_sr(p2)
    if reference is None:
        raise NoneExists("new profile admits no stable matching")
    n = instance.n
    single_before = frozenset(a for a in range(n) if not instance.m1.is_matched(a))
    single_after = frozenset(a for a in range(n) if not reference.is_matched(a))

    lists1 = [pl.order() for pl in p1.lists]
    lists2 = [pl.order() for pl in p2.lists]
    m1_pairs = list(instance.m1.pairs)

    pendants: dict[int, int] = {}
    for a in sorted(single_after):
        pend = len(lists1)
        pendants[a] = pend
        for lists in (lists1, lists2):
            lists[a].append(pend)
            lists.append([a])
        if a in single_before:
            m1_pairs.append((a, pend))

    covered = {x for p in m1_pairs for x in p}
    open_agents = [a for a in range(len(lists1)) if a not in covered]
    if len(open_agents) % 2:
        raise InternalError("odd number of agents left single by the initial matching")
    first_dummy = len(lists1)
    dummies = []
    for i, a in enumerate(open_agents):
        dummy = first_dummy + i
        sibling = first_dummy + (i + 1 if i % 2 == 0 else i - 1)
        for lists in (lists1, lists2):
            lists[a].append(dummy)
            lists.append([a, sibling])
        m1_pairs.append((a, dummy))
        dummies.append((a, dummy))

    pendant_shift = len(single_after - single_before)
    dummy_shift = 3 * len(open_agents) // 2
    new_p1 = PreferenceProfile([PreferenceList.strict(o) for o in lists1])
    new_p2 = PreferenceProfile([PreferenceList.strict(o) for o in lists2])
    new_instance = IncrementalInstance(
        new_p1, new_p2, Matching(m1_pairs), instance.k + pendant_shift + dummy_shift
    )
    return Perfectized(
        new_instance,
        n,
        single_before,
        single_after,
        pendants,
        tuple(dummies),
        pendant_shift,
        dummy_shift,
    )


# ---------------------------------------------------------------------------
# Guess-and-propagate


@dataclass(frozen=True)
class Guess:
    """Initial guesses about the target matching.

    ``partners`` fixes the partner of every agent whose list changed and of
    its initial partner. ``h_set`` holds target pairs whose endpoints both
    prefer their initial partners; ``f_set`` holds initial pairs whose
    endpoints both prefer their target partners. ``prefers_new`` maps each
    agent whose initial partner was moved by the guess to True when it
    prefers its target partner to that initial partner.
    """

    partners: dict[int, int]
    h_set: frozenset[Pair] = frozenset()
    f_set: frozenset[Pair] = frozenset()
    prefers_new: dict[int, bool] = field(default_factory=dict)


@dataclass(frozen=True)
class Rejection:
    reason: str


class _Reject(Exception):
    pass


@dataclass
class GuessState:
    """Mutable state of one guess: current matching, best and worst cases, guessed sets."""

    mate: dict[int, int]
    bc: dict[int, int]
    wc: dict[int, int]
    x_set: frozenset[int]
    f_set: frozenset[Pair]
    h_set: frozenset[Pair]

    def matching(self) -> Matching:
        return Matching.from_mates(self.mate)

    def unmatch(self, a: int) -> None:
        b = self.mate.pop(a, None)
        if b is not None:
            del self.mate[b]

    def match(self, a: int, b: int) -> None:
        """Update the matching to contain {a, b}."""
        self.unmatch(a)
        self.unmatch(b)
        self.mate[a] = b
        self.mate[b] = a


class _Run:
    """Shared read-only context for running guesses on one perfectized instance."""

    def __init__(self, instance: IncrementalInstance, pairs: frozenset[Pair] | None = None):
        self.instance = instance
        self.p2 = instance.profile2
        self.n = instance.n
        self.rank = self.p2._ranks
        self.m1 = instance.m1.mate_map()
        if pairs is None:
            pairs = stable_pairs(self.p2)
        self.stable_pairs = pairs
        self.stable_partners: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in sorted(pairs):
            self.stable_partners[a].append(b)
            self.stable_partners[b].append(a)
        for a in range(self.n):
            self.stable_partners[a].sort(key=lambda b, a=a: self.rank[a][b])
        self.changed = instance.changed_agents()

    def prefers(self, a: int, x: int, y: int) -> bool:
        return self.rank[a][x] < self.rank[a][y]

    def weakly(self, a: int, x: int, y: int) -> bool:
        return self.rank[a][x] <= self.rank[a][y]

    # -- initialization ----------------------------------------------------

    def initialize(self, guess: Guess) -> GuessState:
        mate = dict(self.m1)
        state = GuessState(mate, {}, {}, frozenset(), frozenset(guess.f_set), frozenset(guess.h_set))
        block = set(self.changed) | {self.m1[a] for a in self.changed}
        if set(guess.partners) != block:
            raise InvalidArgument("guess must fix a partner for exactly the changed agents and their partners")
        x_set: set[int] = set()
        taken: dict[int, int] = {}
        assignments = [(a, b) for a, b in sorted(guess.partners.items())]
        assignments += [p for h in sorted(guess.h_set) for p in (h, h[::-1])]
        for a, b in assignments:
            if not self.p2.mutually_accept(a, b) or a == b:
                raise InvalidArgument(f"guessed pair {a}-{b} is not acceptable")
            for agent, partner in ((a, b), (b, a)):
                if taken.get(agent, partner) != partner:
                    raise _Reject("two agents guessed to share a partner")
                taken[agent] = partner
        for a, b in assignments:
            state.match(a, b)
            x_set.update((a, b))
        state.x_set = frozenset(x_set)
        for a in x_set:
            state.bc[a] = state.wc[a] = mate[a]
        for a in sorted(x_set):
            partner = self.m1[a]
            if partner in x_set:
                continue
            if partner not in guess.prefers_new:
                raise InvalidArgument(f"missing orientation for agent {partner}")
            if guess.prefers_new[partner]:
                state.wc[partner] = a
            else:
                state.bc[partner] = a
        for a, b in sorted(guess.f_set):
            if self.m1.get(a) != b:
                raise InvalidArgument(f"pair {a}-{b} is not in the initial matching")
            for agent in (a, b):
                if agent in x_set and self.prefers(agent, self.m1[agent], state.bc[agent]):
                    raise _Reject("guessed pair prefers its initial partner")
        for a, b in sorted(guess.f_set):
            for agent, partner in ((a, b), (b, a)):
                # Agents with fixed partners keep their cases.
                if agent not in x_set:
                    state.wc[agent] = partner
            if mate.get(a) == b:
                state.unmatch(a)
        return state

    # -- propagation -------------------------------------------------------

    def _set(self, table: dict[int, int], a: int, value: int, best: bool) -> None:
        old = table.get(a)
        if old is not None:
            if best:
                assert self.weakly(a, old, value), "best case improved"
            else:
                assert self.weakly(a, value, old), "worst case worsened"
        table[a] = value

    def propagate(self, state: GuessState, a: int) -> None:
        bc, wc, mate, m1 = state.bc, state.wc, state.mate, self.m1
        assert a in bc or a in wc, "propagate called without a best or worst case"
        if a in bc:
            chosen = None
            for b in self.stable_partners[a]:
                if not self.prefers(a, bc[a], b):
                    continue
                if b in wc and not self.weakly(b, a, wc[b]):
                    continue
                if not self.weakly(b, a, m1[b]):
                    continue
                chosen = b
                break
            if chosen is None or a in state.x_set or chosen in state.x_set:
                raise _Reject("no admissible stable partner below the best case")
            b = chosen
            ma, mb = mate.get(a), mate.get(b)
            if ma is not None and ma not in wc and m1.get(a) == ma:
                self._set(wc, ma, a, best=False)
            if mb is not None and mb not in bc and m1.get(b) == mb:
                self._set(bc, mb, b, best=True)
            state.match(a, b)
            self._set(bc, a, b, best=True)
            self._set(wc, b, a, best=False)
        else:
            chosen = None
            for b in reversed(self.stable_partners[a]):
                if not self.prefers(a, b, wc[a]):
                    continue
                if b in bc and not self.weakly(b, bc[b], a):
                    continue
                chosen = b
                break
            if chosen is None or a in state.x_set or chosen in state.x_set:
                raise _Reject("no admissible stable partner above the worst case")
            b = chosen
            ma, mb = mate.get(a), mate.get(b)
            if ma is not None and ma not in bc and m1.get(a) == ma:
                self._set(bc, ma, a, best=True)
            if mb is not None and mb not in wc and m1.get(b) == mb:
                self._set(wc, mb, b, best=False)
            state.match(a, b)
            self._set(wc, a, b, best=False)
            self._set(bc, b, a, best=True)

    def _check_invariants(self, state: GuessState) -> None:
        bc, wc, mate, m1 = state.bc, state.wc, state.mate, self.m1
        for c in range(self.n):
            if mate.get(c) != m1.get(c):
                assert c in bc or c in wc, f"agent {c} moved without a case"
            if c not in state.x_set:
                if c in bc:
                    assert self.weakly(c, m1[c], bc[c]), f"best case of {c} above its initial partner"
                if c in wc:
                    assert self.weakly(c, wc[c], m1[c]), f"worst case of {c} below its initial partner"
            if c in bc and c in wc:
                assert bc[c] == wc[c], f"agent {c} has two distinct nontrivial cases"
            if c in mate:
                for table in (bc, wc):
                    if c in table:
                        assert mate[c] == table[c], f"agent {c} not matched to its case"

    def _blocking(self, mate: dict[int, int]) -> tuple[int | None, Pair | None]:
        """Lowest unmatched agent in a blocking pair, else the least blocking pair."""
        pairs = blocking_pairs_of(self.p2, mate)
        singles = [x for p in pairs for x in p if x not in mate]
        if singles:
            return min(singles), None
        return None, (pairs[0] if pairs else None)

    def run(self, guess: Guess) -> Matching:
        state = self.initialize(guess)
        bc, wc = state.bc, state.wc
        guard = self.n * self.n
        for _ in range(guard + 1):
            if __debug__:
                self._check_invariants(state)
            single, pair = self._blocking(state.mate)
            if single is None and pair is None:
                return state.matching()
            if single is not None:
                self.propagate(state, single)
            else:
                a, b = pair
                if a in bc and b in bc:
                    raise _Reject("blocking pair with two fixed best cases")
                assert a in bc or b in bc, "blocking pair without any best case"
                x = b if a in bc else a
                if x not in wc:
                    self._set(wc, x, state.mate[x], best=False)
                self.propagate(state, x)
            for c in bc:
                if c in wc and self.prefers(c, wc[c], bc[c]):
                    raise _Reject("worst case above best case")
        raise InternalError(f"propagation exceeded {guard} iterations")

    # -- guess enumeration -------------------------------------------------

    def guesses(self) -> Iterator[Guess]:
        changed = self.changed
        d = len(changed)
        block = sorted(set(changed) | {self.m1[a] for a in changed})
        cap = d
        for partners in self._partner_guesses(block):
            assigned = set(partners) | set(partners.values())
            h_pool = [
                p
                for p in sorted(self.stable_pairs)
                if p not in self.instance.m1
                and not (set(p) & assigned)
                and self.prefers(p[0], self.m1[p[0]], p[1])
                and self.prefers(p[1], self.m1[p[1]], p[0])
            ]
            for h_size in range(min(cap, len(h_pool)) + 1):
                for h_set in combinations(h_pool, h_size):
                    if len({x for p in h_set for x in p}) != 2 * h_size:
                        continue
                    yield from self._with_h(partners, frozenset(h_set), cap)

    def _with_h(self, partners: dict[int, int], h_set: frozenset[Pair], cap: int) -> Iterator[Guess]:
        fixed = dict(partners)
        for a, b in list(partners.items()) + list(h_set):
            fixed[a], fixed[b] = b, a
        x_set = set(fixed)
        outside = sorted({self.m1[a] for a in x_set} - x_set)
        f_pool = []
        for p in self.instance.m1.pairs:
            ok = True
            for agent, partner in (p, p[::-1]):
                if agent in x_set and not self.prefers(agent, fixed[agent], partner):
                    ok = False
                elif agent not in x_set and not any(
                    self.prefers(agent, s, partner) for s in self.stable_partners[agent]
                ):
                    ok = False
            if ok:
                f_pool.append(p)
        for f_size in range(min(cap, len(f_pool)) + 1):
            for f_set in combinations(f_pool, f_size):
                f_agents = {x for p in f_set for x in p}
                for mask in range(1 << len(outside)):
                    bits = {a: bool(mask >> i & 1) for i, a in enumerate(outside)}
                    # An initial pair whose endpoint prefers its old partner cannot be in F.
                    if any(a in f_agents and not bits[a] for a in outside):
                        continue
                    yield Guess(dict(partners), h_set, frozenset(f_set), bits)

    def _partner_guesses(self, block: list[int]) -> Iterator[dict[int, int]]:
        chosen: dict[int, int] = {}
        used: set[int] = set()

        def rec(i: int) -> Iterator[dict[int, int]]:
            if i == len(block):
                yield dict(chosen)
                return
            a = block[i]
            if a in chosen:
                yield from rec(i + 1)
                return
            for b in sorted(self.stable_partners[a]):
                if b in used or b == a:
                    continue
                if b in block and b in chosen:
                    continue
                chosen[a] = b
                used.update((a, b))
                if b in block:
                    chosen[b] = a
                yield from rec(i + 1)
                if b in block:
                    del chosen[b]
                used.difference_update((a, b))
                del chosen[a]

        yield from rec(0)

    def guess_count_estimate(self) -> int:
        d = len(self.changed)
        block = set(self.changed) | {self.m1[a] for a in self.changed}
        partner_ways = 1
        for a in block:
            partner_ways *= max(1, len(self.stable_partners[a]))
        pairs = len(self.stable_pairs - set(self.instance.m1))
        h_ways = sum(comb(pairs, i) for i in range(d + 1))
        f_ways = sum(comb(len(self.instance.m1), i) for i in range(d + 1))
        # Each initial pair contributes at most one orientation bit.
        return partner_ways * h_ways * f_ways * 2 ** min(4 * d, len(self.instance.m1))


def initialization(instance: IncrementalInstance, guess: Guess) -> GuessState | Rejection:
    """Apply a guess to a perfectized instance."""
    try:
        return _Run(instance).initialize(guess)
    except _Reject as exc:
        return Rejection(str(exc))


def run_guess(
    instance: IncrementalInstance, guess: Guess, pairs: frozenset[Pair] | None = None
) -> Matching | Rejection:
    """Propagate a guess to a stable matching; reject if it exceeds the budget."""
    try:
        found = _Run(instance, pairs).run(guess)
    except _Reject as exc:
        return Rejection(str(exc))
    if diff_count(instance.m1, found) > instance.k:
        return Rejection("over budget")
    return found


def guess_from_solution(instance: IncrementalInstance, target: Matching) -> Guess:
    """The guess that describes a known stable matching of a perfectized instance."""
    p2 = instance.profile2
    m1 = instance.m1.mate_map()
    goal = target.mate_map()
    changed = instance.changed_agents()
    block = set(changed) | {m1[a] for a in changed}
    partners = {a: goal[a] for a in sorted(block)}
    assigned = set(partners) | set(partners.values())

    def prefers(a: int, x: int, y: int) -> bool:
        return p2.rank(a, x) < p2.rank(a, y)

    h_set = frozenset(
        p
        for p in target
        if p not in instance.m1
        and not (set(p) & assigned)
        and prefers(p[0], m1[p[0]], p[1])
        and prefers(p[1], m1[p[1]], p[0])
    )
    f_set = frozenset(
        p
        for p in instance.m1
        if p not in target and prefers(p[0], goal[p[0]], p[1]) and prefers(p[1], goal[p[1]], p[0])
    )
    x_set = assigned | {x for p in h_set for x in p}
    prefers_new = {}
    for a in x_set:
        b = m1[a]
        if b not in x_set:
            prefers_new[b] = prefers(b, goal[b], a)
    return Guess(partners, h_set, f_set, prefers_new)


def solve_isr_xp(
    instance: IncrementalInstance,
    limit: int = DEFAULT_GUESS_LIMIT,
    on_guess: Callable[[Guess, Matching | Rejection], None] | None = None,
) -> Outcome:
    """Closest stable matching of the new roommates profile, by guessing and propagating."""
    p1, p2 = instance.profile1, instance.profile2
    if not (p1.is_strict and p2.is_strict):
        raise InvalidArgument("solve_isr_xp needs strict preferences")
    if find_stable_sr(p2) is None:
        return Infeasible()
    if is_stable(p2, instance.m1):
        return Solution(instance.m1, 0, instance.k)
    reduced = perfectize(instance)
    inner = IncrementalInstance(
        reduced.instance.profile1, reduced.instance.profile2, reduced.instance.m1, 10**9
    )
    run = _Run(inner)
    estimate = run.guess_count_estimate()
    if estimate > limit:
        d = len(run.changed)
        raise ResourceLimit(
            f"guess space of about {estimate} exceeds limit {limit} "
            f"(bound 2^(4d)*n^(5d) = {2 ** (4 * d) * inner.n ** (5 * d)} with d={d}, n={inner.n})"
        )
    best: tuple[int, tuple[Pair, ...]] | None = None
    best_matching: Matching | None = None
    for guess in run.guesses():
        try:
            found = run.run(guess)
        except _Reject as exc:
            if on_guess is not None:
                on_guess(guess, Rejection(str(exc)))
            continue
        if on_guess is not None:
            on_guess(guess, found)
        original = reduced.translate(found)
        key = (diff_count(instance.m1, original), original.pairs)
        if best is None or key < best:
            best, best_matching = key, original
            if key[0] == 0:
                break
    if best_matching is None:
        raise InternalError("every guess rejected although a stable matching exists")
    return Solution(best_matching, best[0], instance.k)
