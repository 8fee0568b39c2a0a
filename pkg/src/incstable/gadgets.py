"""Instance factories for the hardness reductions, with certificates and verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .model import (
    IncrementalInstance,
    InvalidArgument,
    Matching,
    Pair,
    PreferenceList,
    PreferenceProfile,
    is_stable,
    norm_pair,
)

Vertex = tuple[int, int]  # (color, index), both 1-based


@dataclass(frozen=True)
class ColoredGraph:
    """An l-partite graph with classes of equal size and every vertex of the same degree."""

    colors: int
    size: int
    edges: tuple[tuple[Vertex, Vertex], ...]

    def __post_init__(self) -> None:
        if self.colors < 1 or self.size < 1:
            raise InvalidArgument("a colored graph needs at least one color and one vertex per color")
        seen: set[tuple[Vertex, Vertex]] = set()
        normalized = []
        for u, v in self.edges:
            for c, i in (u, v):
                if not (1 <= c <= self.colors and 1 <= i <= self.size):
                    raise InvalidArgument(f"vertex {c}.{i} outside the {self.colors}x{self.size} classes")
            if u[0] == v[0]:
                raise InvalidArgument(f"edge {u[0]}.{u[1]} {v[0]}.{v[1]} joins two vertices of one color")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise InvalidArgument(f"duplicate edge {e[0][0]}.{e[0][1]} {e[1][0]}.{e[1][1]}")
            seen.add(e)
            normalized.append(e)
        object.__setattr__(self, "edges", tuple(sorted(normalized)))
        degrees = {d for d in self.degrees().values()}
        if len(degrees) > 1:
            raise InvalidArgument(f"graph is not regular: degrees {sorted(degrees)}")

    def vertices(self) -> list[Vertex]:
        return [(c, i) for c in range(1, self.colors + 1) for i in range(1, self.size + 1)]

    def degrees(self) -> dict[Vertex, int]:
        deg = {v: 0 for v in self.vertices()}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    @property
    def regularity(self) -> int:
        return next(iter(self.degrees().values()))

    def incident(self, v: Vertex) -> list[int]:
        """Indices (0-based, ascending) of the edges touching ``v``."""
        return [x for x, e in enumerate(self.edges) if v in e]

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return ((u, v) if u < v else (v, u)) in set(self.edges)


@dataclass(frozen=True)
class GadgetSpec:
    """A generated instance together with what it was built from."""

    source: ColoredGraph
    instance: IncrementalInstance
    certificate: Matching | None = None
    index: dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    def agent(self, name: str) -> int:
        return self.index[name]


def _vertex_agent(bar: bool, c: int, i: int, pos: int) -> str:
    return f"{'abar' if bar else 'a'}{c}.{i}.{pos}"


def _edge_agent(x: int, pos: int) -> str:
    return f"e{x + 1}.{pos}"


def gen_isr_from_clique(graph: ColoredGraph) -> GadgetSpec:
    """Build the roommates instance whose cheap stable matchings encode multicolored cliques."""
    ell, nu = graph.colors, graph.size
    names: list[str] = []
    for c in range(1, ell + 1):
        names += [f"s{c}", f"sbar{c}", f"t{c}", f"tbar{c}", f"u{c}", f"ubar{c}"]
        for bar in (False, True):
            for i in range(1, nu + 1):
                names += [_vertex_agent(bar, c, i, p) for p in range(1, 5)]
    for x in range(len(graph.edges)):
        names += [_edge_agent(x, p) for p in range(1, 5)]
    ix = {name: a for a, name in enumerate(names)}

    def a(bar: bool, c: int, i: int, p: int) -> int:
        return ix[_vertex_agent(bar, c, i, p)]

    def e(x: int, p: int) -> int:
        return ix[_edge_agent(x, p)]

    lists: dict[int, list[int]] = {}
    for c in range(1, ell + 1):
        s, sb, t, tb, u, ub = (ix[f"{k}{c}"] for k in ("s", "sbar", "t", "tbar", "u", "ubar"))
        blocks = {i: [e(x, 1) for x in graph.incident((c, i))] for i in range(1, nu + 1)}
        lists[s] = [t] + [y for i in range(1, nu + 1) for y in [a(False, c, i, 1), a(True, c, i, 1)] + blocks[i]]
        lists[sb] = [tb] + [y for i in range(nu, 0, -1) for y in [a(False, c, i, 4), a(True, c, i, 4)] + blocks[i]]
        lists[t], lists[tb], lists[u], lists[ub] = [s, u], [sb, ub], [t], [tb]
        for bar in (False, True):
            for i in range(1, nu + 1):
                q = [a(bar, c, i, p) for p in range(1, 5)]
                lists[q[0]] = [q[1], s, q[3]]
                lists[q[1]] = [q[2], q[0]]
                lists[q[2]] = [q[3], q[1]]
                lists[q[3]] = [q[0], sb, q[2]]
    for x, ((c, _), (c2, _)) in enumerate(graph.edges):
        q = [e(x, p) for p in range(1, 5)]
        sides = [ix[f"s{c}"], ix[f"sbar{c}"], ix[f"s{c2}"], ix[f"sbar{c2}"]]
        lists[q[0]] = [q[1]] + sides + [q[3]]
        lists[q[1]] = [q[2], q[0]]
        lists[q[2]] = [q[3], q[1]]
        lists[q[3]] = [q[0], q[2]]

    p1 = PreferenceProfile([PreferenceList.strict(lists[v]) for v in range(len(names))])
    updates = {}
    for c in range(1, ell + 1):
        updates[ix[f"t{c}"]] = PreferenceList.strict([ix[f"u{c}"], ix[f"s{c}"]])
        updates[ix[f"tbar{c}"]] = PreferenceList.strict([ix[f"ubar{c}"], ix[f"sbar{c}"]])
    p2 = p1.with_lists(updates)

    m1: list[Pair] = []
    for c in range(1, ell + 1):
        m1 += [(ix[f"s{c}"], ix[f"t{c}"]), (ix[f"sbar{c}"], ix[f"tbar{c}"])]
        for i in range(1, nu + 1):
            m1 += [(a(False, c, i, 1), a(False, c, i, 2)), (a(False, c, i, 3), a(False, c, i, 4))]
            m1 += [(a(True, c, i, 1), a(True, c, i, 4)), (a(True, c, i, 3), a(True, c, i, 2))]
    for x in range(len(graph.edges)):
        m1 += [(e(x, 1), e(x, 4)), (e(x, 3), e(x, 2))]
    k = ell * (4 * nu + 5) + 4 * (len(graph.edges) - comb(ell, 2))
    instance = IncrementalInstance(p1, p2, Matching(m1), k, names=tuple(names))
    return GadgetSpec(graph, instance, None, ix)


def _cycle(spec: GadgetSpec, bar: bool, c: int, i: int, closed: bool) -> list[Pair]:
    """``closed``: pairs {1,2},{3,4}; otherwise {1,4},{3,2}."""
    q = [spec.agent(_vertex_agent(bar, c, i, p)) for p in range(1, 5)]
    if closed:
        return [(q[0], q[1]), (q[2], q[3])]
    return [(q[0], q[3]), (q[2], q[1])]


def _edge_cycle(spec: GadgetSpec, x: int, closed: bool) -> list[Pair]:
    q = [spec.agent(_edge_agent(x, p)) for p in range(1, 5)]
    if closed:
        return [(q[0], q[1]), (q[2], q[3])]
    return [(q[0], q[3]), (q[2], q[1])]


def certify_clique_solution(spec: GadgetSpec, clique: Iterable[Vertex]) -> Matching:
    """The stable matching of the new profile selecting ``clique``; its distance to ``m1`` is exactly ``k``."""
    graph = spec.source
    chosen = list(clique)
    pick: dict[int, int] = {}
    for c, i in chosen:
        if not (1 <= c <= graph.colors and 1 <= i <= graph.size):
            raise InvalidArgument(f"vertex {c}.{i} is not in the graph")
        if c in pick:
            raise InvalidArgument(f"two clique vertices share color {c}")
        pick[c] = i
    if len(pick) != graph.colors:
        raise InvalidArgument("a multicolored clique needs one vertex per color")
    for x, u in enumerate(chosen):
        for v in chosen[x + 1 :]:
            if not graph.has_edge(u, v):
                raise InvalidArgument(f"{u[0]}.{u[1]} and {v[0]}.{v[1]} are not adjacent")

    pairs: list[Pair] = []
    for c, h in pick.items():
        ag = spec.agent
        pairs += [(ag(f"t{c}"), ag(f"u{c}")), (ag(f"tbar{c}"), ag(f"ubar{c}"))]
        pairs += [(ag(f"s{c}"), ag(_vertex_agent(False, c, h, 1))), (ag(f"sbar{c}"), ag(_vertex_agent(False, c, h, 4)))]
        pairs += [(ag(_vertex_agent(False, c, h, 2)), ag(_vertex_agent(False, c, h, 3)))]
        pairs += _cycle(spec, True, c, h, closed=False)
        for i in range(1, graph.size + 1):
            if i != h:
                pairs += _cycle(spec, False, c, i, closed=i < h) + _cycle(spec, True, c, i, closed=i < h)
    selected = set((c, i) for c, i in pick.items())
    for x, (u, v) in enumerate(graph.edges):
        pairs += _edge_cycle(spec, x, closed=not (u in selected and v in selected))
    return Matching(pairs)


@dataclass(frozen=True)
class CharacterizationReport:
    """Items of the stability characterization, each evaluated on its own."""

    tu_pairs: bool
    vertex_gadgets: bool
    edge_gadgets: bool
    consistency: bool
    selected: dict[int, int]

    @property
    def items(self) -> tuple[bool, bool, bool, bool]:
        return (self.tu_pairs, self.vertex_gadgets, self.edge_gadgets, self.consistency)

    @property
    def holds(self) -> bool:
        return all(self.items)


def check_stable_characterization(spec: GadgetSpec, matching: Matching) -> CharacterizationReport:
    """Evaluate the four structural conditions that together are equivalent to stability."""
    graph = spec.source
    ag = spec.agent
    have = set(matching.pairs)

    def contains(pairs: Iterable[Sequence[int]]) -> bool:
        return all(norm_pair(x, y) in have for x, y in pairs)

    tu = all(
        contains([(ag(f"t{c}"), ag(f"u{c}")), (ag(f"tbar{c}"), ag(f"ubar{c}"))])
        for c in range(1, graph.colors + 1)
    )

    selected: dict[int, int] = {}
    for c in range(1, graph.colors + 1):
        for i in range(1, graph.size + 1):
            if contains([(ag(f"s{c}"), ag(_vertex_agent(False, c, i, 1)))]):
                selected[c] = i

    vertex_ok = True
    for c in range(1, graph.colors + 1):
        i = selected.get(c)
        if i is None:
            vertex_ok = False
            break
        need = [
            (ag(f"sbar{c}"), ag(_vertex_agent(False, c, i, 4))),
            (ag(_vertex_agent(False, c, i, 2)), ag(_vertex_agent(False, c, i, 3))),
        ]
        for j in range(1, graph.size + 1):
            if j != i:
                need += _cycle(spec, False, c, j, closed=j < i) + _cycle(spec, True, c, j, closed=j < i)
        either = contains(_cycle(spec, True, c, i, closed=True)) or contains(_cycle(spec, True, c, i, closed=False))
        if not (contains(need) and either):
            vertex_ok = False
            break

    edge_ok = all(
        contains(_edge_cycle(spec, x, True)) or contains(_edge_cycle(spec, x, False))
        for x in range(len(graph.edges))
    )

    consistent = True
    for x, (u, v) in enumerate(graph.edges):
        both = all(contains([(ag(f"s{w[0]}"), ag(_vertex_agent(False, w[0], w[1], 1)))]) for w in (u, v))
        if not both and not contains(_edge_cycle(spec, x, True)):
            consistent = False
            break
    return CharacterizationReport(tu, vertex_ok, edge_ok, consistent, selected)


# Forced pairs --------------------------------------------------------------

_ROLES = ("lt", "lm", "lb", "rt", "rm", "rb")


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name = "_" + name
    taken.add(name)
    return name


def _replace(pl: PreferenceList, old: int, new: int) -> PreferenceList:
    return PreferenceList([new if x == old else x for x in tier] for tier in pl.tiers)


def _forced_order(instance: IncrementalInstance) -> list[tuple[int, int]]:
    """Forced pairs as (v, w) with ``v`` on the first side, in ascending order."""
    left = instance.profile2.bipartition[0]
    return sorted((a, b) if a in left else (b, a) for a, b in instance.forced)


def _forced_id(n: int, copies: int, q: int, p: int, role: str) -> int:
    """Id of gadget agent ``role`` in copy ``p`` (1-based) for the ``q``-th forced pair."""
    return n + 6 * copies * q + 6 * (p - 1) + _ROLES.index(role)


def apply_forced_pair_gadget(instance: IncrementalInstance) -> IncrementalInstance:
    """Replace every forced pair by a chain of ``k + 1`` six-agent cycles; the budget is unchanged."""
    p1, p2 = instance.profile1, instance.profile2
    if p2.bipartition is None or p1.bipartition is None:
        raise InvalidArgument("the forced-pair gadget needs a bipartite instance")
    for pair in sorted(instance.forced):
        if pair not in instance.m1:
            raise InvalidArgument(f"forced pair {pair} is not in the initial matching")
        if not p2.mutually_accept(*pair):
            raise InvalidArgument(f"forced pair {pair} is not acceptable in the new profile")
    order = _forced_order(instance)
    if not order:
        return instance
    n, copies = instance.n, instance.k + 1
    names = list(instance.agent_names())
    taken = set(names)
    left, right = set(p2.bipartition[0]), set(p2.bipartition[1])

    gadget_lists: dict[int, list[int]] = {}
    m_extra: list[Pair] = []
    rewire: list[tuple[int, int, int]] = []
    for q, (v, w) in enumerate(order):
        def g(p: int, role: str) -> int:
            return _forced_id(n, copies, q, p, role)

        for p in range(1, copies + 1):
            for role in _ROLES:
                names.append(_fresh(f"{instance.name(v)}.{instance.name(w)}.{role}{p}", taken))
                (left if role in ("lt", "lb", "rm") else right).add(g(p, role))
            gadget_lists[g(p, "lt")] = [g(p, "rt"), g(p, "lm")]
            gadget_lists[g(p, "lm")] = [g(p, "lt"), v if p == 1 else g(p - 1, "rm"), g(p, "lb")]
            gadget_lists[g(p, "lb")] = [g(p, "lm"), g(p, "rb")]
            gadget_lists[g(p, "rt")] = [g(p, "rm"), g(p, "lt")]
            gadget_lists[g(p, "rm")] = [g(p, "rb"), w if p == copies else g(p + 1, "lm"), g(p, "rt")]
            gadget_lists[g(p, "rb")] = [g(p, "lb"), g(p, "rm")]
        rewire += [(v, w, g(1, "lm")), (w, v, g(copies, "rm"))]
        m_extra += _forced_chain_pairs(n, copies, q, v, w)

    def build(profile: PreferenceProfile) -> PreferenceProfile:
        lists = list(profile.lists)
        for agent, old, new in rewire:
            lists[agent] = _replace(lists[agent], old, new)
        for a in sorted(gadget_lists):
            lists.append(PreferenceList.strict(gadget_lists[a]))
        return PreferenceProfile(lists, (left, right))

    m1 = Matching([p for p in instance.m1.pairs if p not in instance.forced] + m_extra)
    return IncrementalInstance(build(p1), build(p2), m1, instance.k, frozenset(), tuple(names))


def _forced_chain_pairs(n: int, copies: int, q: int, v: int, w: int) -> list[Pair]:
    """The chain matching standing in for the forced pair {v, w}."""
    def g(p: int, role: str) -> int:
        return _forced_id(n, copies, q, p, role)

    pairs = [(v, g(1, "lm")), (g(copies, "rm"), w)]
    for p in range(1, copies + 1):
        pairs += [(g(p, "lt"), g(p, "rt")), (g(p, "lb"), g(p, "rb"))]
    pairs += [(g(p, "rm"), g(p + 1, "lm")) for p in range(1, copies)]
    return pairs


def lift_forced_solution(instance: IncrementalInstance, m2: Matching) -> Matching:
    """Carry a stable matching containing every forced pair over to the gadget instance."""
    missing = [p for p in sorted(instance.forced) if p not in m2]
    if missing:
        raise InvalidArgument(f"matching lacks forced pair {missing[0]}")
    pairs = [p for p in m2.pairs if p not in instance.forced]
    for q, (v, w) in enumerate(_forced_order(instance)):
        pairs += _forced_chain_pairs(instance.n, instance.k + 1, q, v, w)
    return Matching(pairs)


# Forbidden pairs -----------------------------------------------------------


@dataclass(frozen=True)
class _Forbidden:
    pairs: tuple[tuple[int, int], ...]  # (v_i, w_i), v on the first side
    copies: int
    n: int

    def id(self, i: int, j: int, role: str) -> int:
        """Gadget agent ``role`` for pair ``i`` and copy ``j``, both 1-based."""
        return self.n + 6 * self.copies * (i - 1) + 6 * (j - 1) + _ROLES.index(role)


def _forbidden_layout(instance: IncrementalInstance, forbidden: Iterable[Sequence[int]]) -> _Forbidden:
    p1, p2 = instance.profile1, instance.profile2
    if p2.bipartition is None or p1.bipartition is None:
        raise InvalidArgument("the forbidden-pairs gadget needs a bipartite instance")
    if not (p1.is_bipartite_complete() and p2.is_bipartite_complete()):
        raise InvalidArgument("the forbidden-pairs gadget needs complete preferences in both profiles")
    left = p2.bipartition[0]
    oriented = []
    for a, b in forbidden:
        if not p2.mutually_accept(a, b):
            raise InvalidArgument(f"forbidden pair {(a, b)} does not cross the bipartition")
        if norm_pair(a, b) in instance.m1:
            raise InvalidArgument(f"forbidden pair {norm_pair(a, b)} is in the initial matching")
        oriented.append((a, b) if a in left else (b, a))
    if oriented:
        w0 = oriented[0][1]
        oriented.sort(key=lambda vw: (p2.rank(w0, vw[0]), vw))
    for side in (0, 1):
        heads = [pair[side] for pair in oriented]
        if any(p2[x] != p2[heads[0]] for x in heads):
            raise InvalidArgument("forbidden-pair endpoints on one side must share a preference list")
    for _, wk in oriented:
        for x in range(len(oriented) - 1):
            vi, vj = oriented[x][0], oriented[x + 1][0]
            if not p2.rank(wk, vi) < p2.rank(wk, vj):
                raise InvalidArgument("forbidden pairs are not nested along the shared preference lists")
    for vk, _ in oriented:
        for x in range(len(oriented) - 1):
            wi, wj = oriented[x][1], oriented[x + 1][1]
            if not p2.rank(vk, wi) < p2.rank(vk, wj):
                raise InvalidArgument("forbidden pairs are not nested along the shared preference lists")
    return _Forbidden(tuple(oriented), instance.n + 1, instance.n)


def apply_forbidden_pairs_gadget(
    instance: IncrementalInstance, forbidden: Iterable[Sequence[int]]
) -> IncrementalInstance:
    """Attach a chain gadget that makes every pair of ``forbidden`` too expensive to use."""
    lay = _forbidden_layout(instance, forbidden)
    if not lay.pairs:
        return instance
    p2 = instance.profile2
    r, s, n = len(lay.pairs), lay.copies, instance.n
    ids = lay.id
    total = n + 6 * r * s
    left, right = set(p2.bipartition[0]), set(p2.bipartition[1])
    names = list(instance.agent_names())
    taken = set(names)
    for i in range(1, r + 1):
        for j in range(1, s + 1):
            for role in _ROLES:
                names.append(_fresh(f"x{i}.{j}.{role}", taken))
                (left if role in ("lt", "lb", "rm") else right).add(ids(i, j, role))
    vs = [v for v, _ in lay.pairs]
    ws = [w for _, w in lay.pairs]

    def concat(block) -> list[int]:
        return [x for i in range(1, r + 1) for x in block(i)]

    def run(i: int, pattern: Sequence[tuple[str, int]], lo: int, hi: int) -> list[int]:
        return [ids(i, j + off, role) for j in range(lo, hi + 1) for role, off in pattern]

    heads: dict[str, list[int]] = {
        "lt": concat(lambda i: run(i, [("rt", 0), ("lm", 0)], 1, s)),
        "lm": concat(lambda i: run(i, [("lt", 1), ("rm", 0), ("lb", 1)], 1, s - 1)),
        "lm1": concat(lambda i: [ids(i, 1, "lt"), vs[i - 1], ids(i, 1, "lb")]),
        "lb": concat(lambda i: run(i, [("lm", 0), ("rb", 0)], 1, s)),
        "rt": concat(lambda i: run(i, [("rm", 0), ("lt", 0)], 1, s)),
        "rm": concat(lambda i: run(i, [("rb", 0), ("lm", 1), ("rt", 0)], 1, s - 1)),
        "rms": concat(lambda i: [ids(i, s, "rb"), ws[i - 1], ids(i, s, "rt")]),
        "rb": concat(lambda i: run(i, [("lb", 0), ("rm", 0)], 1, s)),
    }

    def complete(a: int, front: list[int]) -> PreferenceList:
        opposite = right if a in left else left
        listed = set(front)
        return PreferenceList.strict(front + [x for x in sorted(opposite) if x not in listed])

    lists2: list[PreferenceList] = []
    for a in range(n):
        pl = p2[a]
        for x, (v, w) in enumerate(lay.pairs):
            if a == v:
                pl = _replace(pl, w, ids(x + 1, 1, "lm"))
            elif a == w:
                pl = _replace(pl, v, ids(x + 1, s, "rm"))
        opposite = right if a in left else left
        missing = sorted(set(opposite) - pl.accepts)
        lists2.append(PreferenceList(list(pl.tiers) + [(x,) for x in missing]))
    for i in range(1, r + 1):
        for j in range(1, s + 1):
            for role in _ROLES:
                key = role
                if role == "lm" and j == 1:
                    key = "lm1"
                elif role == "rm" and j == s:
                    key = "rms"
                lists2.append(complete(ids(i, j, role), heads[key]))
    bip = (left, right)
    prof2 = PreferenceProfile(lists2, bip)

    extra = []
    for i in range(1, r + 1):
        for j in range(1, s + 1):
            extra += [(ids(i, j, "lt"), ids(i, j, "lm")), (ids(i, j, "rm"), ids(i, j, "rb"))]
            extra += [(ids(i, j, "lb"), ids(i, j, "rt"))]
    m1 = Matching(list(instance.m1.pairs) + extra)
    mate = m1.mate_map()
    lists1 = []
    for a in range(total):
        pl = prof2[a]
        if a in mate:
            pl = PreferenceList([(mate[a],)] + list(pl.without([mate[a]]).tiers))
        lists1.append(pl)
    prof1 = PreferenceProfile(lists1, bip)

    # Overlap needed with the old matching, shifted by one pair per copy.
    overlap = len(instance.m1) - instance.k // 2
    overlap_new = overlap + r * s
    size = len(instance.m1) + 3 * r * s
    k_new = 2 * (size - overlap_new)
    return IncrementalInstance(prof1, prof2, m1, k_new, instance.forced, tuple(names))


def lift_forbidden_solution(
    instance: IncrementalInstance, forbidden: Iterable[Sequence[int]], m2: Matching
) -> Matching:
    """Extend a stable matching avoiding ``forbidden`` to the gadget instance."""
    lay = _forbidden_layout(instance, forbidden)
    p2 = instance.profile2
    pairs = list(m2.pairs)
    for i, (v, w) in enumerate(lay.pairs, start=1):
        if norm_pair(v, w) in m2:
            raise InvalidArgument(f"matching uses forbidden pair {norm_pair(v, w)}")
        partner = m2.partner(v)
        prefers = p2.rank(v, w) < p2.rank(v, partner)
        for j in range(1, lay.copies + 1):
            g = lambda role: lay.id(i, j, role)  # noqa: E731
            if prefers:
                pairs += [(g("lt"), g("lm")), (g("rt"), g("rm")), (g("lb"), g("rb"))]
            else:
                pairs += [(g("lt"), g("rt")), (g("rm"), g("rb")), (g("lb"), g("lm"))]
    return Matching(pairs)


def is_certificate(spec: GadgetSpec, matching: Matching) -> bool:
    """Stable in the new profile and exactly ``k`` away from the old matching."""
    inst = spec.instance
    return is_stable(inst.profile2, matching) and len(set(inst.m1.pairs) ^ set(matching.pairs)) == inst.k
