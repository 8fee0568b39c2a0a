"""Classic stable-matching subroutines: deferred acceptance, Irving, stable pairs."""

from __future__ import annotations

from collections import deque

from .model import (
    InternalError,
    InvalidArgument,
    Matching,
    NoneExists,
    Pair,
    PreferenceList,
    PreferenceProfile,
    is_stable,
    norm_pair,
)


def _require_symmetric(profile: PreferenceProfile) -> None:
    bad = profile.violations()
    if bad:
        raise InvalidArgument(str(bad[0]))


def find_stable_sm(profile: PreferenceProfile) -> Matching:
    """Men-proposing deferred acceptance; ties broken by ascending agent id.

    The proposing side is the first side of the bipartition.
    """
    if profile.bipartition is None:
        raise InvalidArgument("stable marriage needs a bipartite profile")
    _require_symmetric(profile)
    proposers = sorted(profile.bipartition[0])
    # After tie-breaking each list is a strict order; rank by position.
    order = {a: profile[a].order() for a in range(profile.n)}
    pos = {a: {x: i for i, x in enumerate(order[a])} for a in range(profile.n)}
    next_choice = {m: 0 for m in proposers}
    engaged: dict[int, int] = {}
    free = deque(proposers)
    while free:
        m = free.popleft()
        prefs = order[m]
        while next_choice[m] < len(prefs):
            w = prefs[next_choice[m]]
            next_choice[m] += 1
            current = engaged.get(w)
            if current is None:
                engaged[w] = m
                break
            if pos[w][m] < pos[w][current]:
                engaged[w] = m
                free.append(current)
                break
    return Matching((m, w) for w, m in engaged.items())


class _Table:
    """Mutable reduced preference table used by Irving's algorithm."""

    def __init__(self, profile: PreferenceProfile):
        self.order = [profile[a].order() for a in range(profile.n)]
        self.pos = [{x: i for i, x in enumerate(o)} for o in self.order]
        self.alive = [set(o) for o in self.order]

    def delete(self, a: int, b: int) -> None:
        self.alive[a].discard(b)
        self.alive[b].discard(a)

    def first(self, a: int) -> int | None:
        for x in self.order[a]:
            if x in self.alive[a]:
                return x
        return None

    def second(self, a: int) -> int | None:
        seen = False
        for x in self.order[a]:
            if x in self.alive[a]:
                if seen:
                    return x
                seen = True
        return None

    def last(self, a: int) -> int | None:
        for x in reversed(self.order[a]):
            if x in self.alive[a]:
                return x
        return None

    def truncate_after(self, a: int, b: int) -> None:
        """Delete every agent that ``a`` ranks below ``b``."""
        cut = self.pos[a][b]
        for x in self.order[a][cut + 1 :]:
            if x in self.alive[a]:
                self.delete(a, x)


def find_stable_sr(profile: PreferenceProfile) -> Matching | None:
    """Irving's algorithm, extended to incomplete lists; None when no stable matching exists."""
    if not profile.is_strict:
        raise InvalidArgument("Irving's algorithm needs strict preferences")
    _require_symmetric(profile)
    n = profile.n
    table = _Table(profile)

    # Phase 1: proposals; a holder truncates its list after the proposer it holds.
    holds: dict[int, int] = {}
    free = deque(range(n))
    while free:
        x = free.popleft()
        while True:
            y = table.first(x)
            if y is None:
                break
            held = holds.get(y)
            if held is None or table.pos[y][x] < table.pos[y][held]:
                holds[y] = x
                table.truncate_after(y, x)
                if held is not None:
                    free.append(held)
                break
            table.delete(x, y)

    # Agents nobody proposes to are unmatched in every stable matching.
    changed = True
    while changed:
        changed = False
        for y in range(n):
            if table.alive[y] and not any(table.first(x) == y for x in table.alive[y]):
                for x in list(table.alive[y]):
                    table.delete(x, y)
                changed = True

    # Phase 2: eliminate rotations, always starting from the lowest-id agent.
    while True:
        start = next((a for a in range(n) if len(table.alive[a]) >= 2), None)
        if start is None:
            break
        seq = [start]
        seen = {start: 0}
        while True:
            q = table.second(seq[-1])
            if q is None:
                raise InternalError("rotation walk reached an agent with a single entry")
            p = table.last(q)
            if p in seen:
                cycle = seq[seen[p] :]
                break
            seen[p] = len(seq)
            seq.append(p)
        targets = [table.second(p) for p in cycle]
        before = {a for a in range(n) if table.alive[a]}
        for i, p in enumerate(cycle):
            # second(p_i) keeps p_i as its last acceptable agent.
            table.truncate_after(targets[i], p)
        if any(not table.alive[a] for a in before):
            return None

    mate: dict[int, int] = {}
    for a in range(n):
        if table.alive[a]:
            (b,) = table.alive[a]
            mate[a] = b
    for a, b in mate.items():
        if mate.get(b) != a:
            return None
    result = Matching.from_mates(mate)
    if not is_stable(profile, result):
        return None
    return result


def matched_set(profile: PreferenceProfile, matching: Matching) -> frozenset[int]:
    """Agents matched by ``matching``; identical across stable matchings of a strict profile."""
    return matching.matched_agents()


def force_pair(profile: PreferenceProfile, a: int, b: int) -> PreferenceProfile:
    """Profile whose stable matchings correspond to those containing ``{a, b}``.

    Agents that ``a`` prefers to ``b`` keep only partners they prefer to ``a``,
    and symmetrically for ``b``; ``a`` and ``b`` then only accept each other.
    """
    lists = {}
    for c in range(profile.n):
        if c in (a, b):
            continue
        pl = profile[c]
        keep = pl.order()
        for x, y in ((a, b), (b, a)):
            if profile.accepts(x, c) and profile.rank(x, c) < profile.rank(x, y):
                cut = pl.rank(x)
                keep = [z for z in keep if pl.rank(z) < cut]
        keep = [z for z in keep if z not in (a, b)]
        lists[c] = keep
    new = []
    for c in range(profile.n):
        if c == a:
            new.append(PreferenceList.strict([b]))
        elif c == b:
            new.append(PreferenceList.strict([a]))
        else:
            new.append(PreferenceList.strict(lists[c]))
    # Deletions above are one-sided; restore symmetry.
    accepted = [set(pl.accepts) for pl in new]
    final = [
        PreferenceList.strict([x for x in new[c].order() if c in accepted[x]]) for c in range(profile.n)
    ]
    return PreferenceProfile(final, profile.bipartition)


def is_stable_pair(profile: PreferenceProfile, a: int, b: int) -> bool:
    if not profile.mutually_accept(a, b):
        return False
    candidate = find_stable_sr(force_pair(profile, a, b))
    return candidate is not None and is_stable(profile, candidate)


def stable_pairs(profile: PreferenceProfile) -> frozenset[Pair]:
    """Pairs contained in at least one stable matching (strict preferences)."""
    if not profile.is_strict:
        raise InvalidArgument("stable pairs are only computed for strict preferences")
    if find_stable_sr(profile) is None:
        raise NoneExists("profile admits no stable matching")
    return frozenset(p for p in profile.pairs() if is_stable_pair(profile, *p))


def max_weight_stable_marriage(
    profile: PreferenceProfile, weights: dict[Pair, float]
) -> Matching:
    """Stable matching of a strict bipartite profile maximizing the summed pair weights.

    Solved as an integer program over the stable-marriage polytope: each
    agent is matched at most once, and every acceptable pair is covered by
    a weakly better partner of one side or a strictly better one of the other.
    """
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    if profile.bipartition is None:
        raise InvalidArgument("stable marriage needs a bipartite profile")
    if not profile.is_strict:
        raise InvalidArgument("weighted stable marriage needs strict preferences")
    _require_symmetric(profile)
    edges = profile.pairs()
    if not edges:
        return Matching()
    index = {e: i for i, e in enumerate(edges)}
    n, m = profile.n, len(edges)
    incident: list[list[int]] = [[] for _ in range(n)]
    for i, (a, b) in enumerate(edges):
        incident[a].append(i)
        incident[b].append(i)

    rows: list[np.ndarray] = []
    lower: list[float] = []
    upper: list[float] = []
    for a in range(n):
        if incident[a]:
            row = np.zeros(m)
            row[incident[a]] = 1
            rows.append(row)
            lower.append(-np.inf)
            upper.append(1)
    first = profile.bipartition[0]
    for a, b in edges:
        u, w = (a, b) if a in first else (b, a)
        row = np.zeros(m)
        for x in profile[u].accepts:
            if profile.rank(u, x) <= profile.rank(u, w):
                row[index[norm_pair(u, x)]] = 1
        for y in profile[w].accepts:
            if profile.rank(w, y) < profile.rank(w, u):
                row[index[norm_pair(w, y)]] = 1
        rows.append(row)
        lower.append(1)
        upper.append(np.inf)
    cost = -np.array([weights.get(e, 0.0) for e in edges], dtype=float)
    result = milp(
        cost,
        constraints=LinearConstraint(np.vstack(rows), lower, upper),
        integrality=np.ones(m),
        bounds=Bounds(0, 1),
    )
    if result.x is None:
        raise InternalError(f"stable marriage program failed: {result.message}")
    chosen = Matching(e for e, v in zip(edges, result.x) if v > 0.5)
    if not is_stable(profile, chosen):
        raise InternalError("weighted stable marriage returned an unstable matching")
    return chosen
