"""Line-oriented text formats for instances, graphs and matchings; JSON result documents."""

from __future__ import annotations

import json
import re
from typing import Iterable, Sequence

from .gadgets import ColoredGraph
from .model import (
    IncrementalInstance,
    Infeasible,
    InvalidArgument,
    Matching,
    Outcome,
    PreferenceList,
    PreferenceProfile,
    norm_pair,
)

_NAME = re.compile(r"[^\s()>|:#\-]+")
_TOKEN = re.compile(r"\(|\)|>|[^\s()>]+")


class ParseError(InvalidArgument):
    """Malformed input; ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


_RESERVED = frozenset({"agents", "bipartition", "k", "forced"})


def _check_name(token: str, line: int) -> str:
    if not _NAME.fullmatch(token):
        raise ParseError(f"invalid agent name {token!r}", line)
    if token in _RESERVED:
        raise ParseError(f"agent name {token!r} is a reserved key", line)
    return token


def _parse_list(text: str, ids: dict[str, int], line: int) -> PreferenceList:
    tokens = _TOKEN.findall(text)
    tiers: list[list[int]] = []
    seen: set[int] = set()
    i = 0
    expect_tier = True
    while i < len(tokens):
        tok = tokens[i]
        if not expect_tier:
            if tok != ">":
                raise ParseError(f"expected '>' before {tok!r}", line)
            expect_tier = True
            i += 1
            continue
        if tok == "(":
            try:
                close = tokens.index(")", i + 1)
            except ValueError:
                raise ParseError("unclosed '('", line) from None
            names = tokens[i + 1 : close]
            if not names or any(t in ("(", ">") for t in names):
                raise ParseError("a tie must list agent names only", line)
            i = close + 1
        elif tok in (")", ">"):
            raise ParseError(f"unexpected {tok!r}", line)
        else:
            names = [tok]
            i += 1
        tier = []
        for name in names:
            if name not in ids:
                raise ParseError(f"unknown agent {name!r}", line)
            a = ids[name]
            if a in seen:
                raise ParseError(f"agent {name!r} listed twice", line)
            seen.add(a)
            tier.append(a)
        tiers.append(tier)
        expect_tier = False
    if tokens and expect_tier:
        raise ParseError("list ends with '>'", line)
    return PreferenceList(tiers)


def _parse_pair(token: str, ids: dict[str, int], line: int | None) -> tuple[int, int]:
    parts = token.split("-")
    if len(parts) != 2:
        raise ParseError(f"pair {token!r} must look like a-b", line)
    for name in parts:
        if name not in ids:
            raise ParseError(f"unknown agent {name!r}", line)
    a, b = ids[parts[0]], ids[parts[1]]
    if a == b:
        raise ParseError(f"pair {token!r} repeats an agent", line)
    return a, b


def parse_pairs(text: str, ids: dict[str, int], line: int | None = None) -> list[tuple[int, int]]:
    """Pairs written as ``a-b`` separated by whitespace or commas."""
    return [_parse_pair(tok, ids, line) for tok in re.split(r"[\s,]+", text.strip()) if tok]


def _matching(pairs: Sequence[tuple[int, int]], names: Sequence[str], line: int | None) -> Matching:
    used: set[int] = set()
    for a, b in pairs:
        for x in (a, b):
            if x in used:
                raise ParseError(f"agent {names[x]!r} matched twice", line)
            used.add(x)
    return Matching(pairs)


def parse_instance(text: str) -> IncrementalInstance:
    """Read an instance; every error names its line."""
    names: list[str] | None = None
    ids: dict[str, int] = {}
    bipartition = None
    profiles: dict[str, dict[int, PreferenceList]] = {}
    current: dict[int, PreferenceList] | None = None
    m1: Matching | None = None
    k: int | None = None
    forced: list[tuple[int, int]] = []
    seen_keys: set[str] = set()

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        head, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value', got {line!r}", number)
        key = " ".join(head.split())
        rest = rest.strip()

        if key in ("agents", "bipartition", "profile P1", "profile P2", "matching M1", "k", "forced"):
            if key in seen_keys:
                raise ParseError(f"duplicate section {key!r}", number)
            seen_keys.add(key)
            if key != "agents" and names is None:
                raise ParseError("the 'agents' line must come first", number)
            current = None
        if key == "agents":
            tokens = rest.split()
            if not tokens:
                raise ParseError("no agents declared", number)
            names = [_check_name(t, number) for t in tokens]
            if len(set(names)) != len(names):
                dup = next(t for t in names if names.count(t) > 1)
                raise ParseError(f"agent {dup!r} declared twice", number)
            ids = {name: a for a, name in enumerate(names)}
        elif key == "bipartition":
            sides = rest.split("|")
            if len(sides) != 2:
                raise ParseError("bipartition needs exactly one '|'", number)
            parts = []
            for side in sides:
                members = []
                for tok in side.split():
                    if tok not in ids:
                        raise ParseError(f"unknown agent {tok!r}", number)
                    members.append(ids[tok])
                parts.append(members)
            if sorted(parts[0] + parts[1]) != list(range(len(ids))):
                raise ParseError("bipartition must list every agent exactly once", number)
            bipartition = (frozenset(parts[0]), frozenset(parts[1]))
        elif key in ("profile P1", "profile P2"):
            if rest:
                raise ParseError(f"unexpected text after {key!r}", number)
            current = profiles.setdefault(key[-2:], {})
        elif key == "matching M1":
            m1 = _matching(parse_pairs(rest, ids, number), names, number)
        elif key == "k":
            if not re.fullmatch(r"\d+", rest):
                raise ParseError(f"budget must be a non-negative integer, got {rest!r}", number)
            k = int(rest)
        elif key == "forced":
            forced = parse_pairs(rest, ids, number)
        elif current is not None and key in ids:
            a = ids[key]
            if a in current:
                raise ParseError(f"second list for agent {key!r}", number)
            current[a] = _parse_list(rest, ids, number)
        elif current is not None:
            raise ParseError(f"unknown agent {key!r}", number)
        else:
            raise ParseError(f"unknown key {key!r}", number)

    if names is None:
        raise ParseError("missing 'agents' line")
    for label in ("P1", "P2"):
        if label not in profiles:
            raise ParseError(f"missing 'profile {label}:' section")
    if m1 is None:
        raise ParseError("missing 'matching M1:' line")
    if k is None:
        raise ParseError("missing 'k:' line")
    built = []
    for label in ("P1", "P2"):
        lists = [profiles[label].get(a, PreferenceList()) for a in range(len(names))]
        try:
            built.append(PreferenceProfile(lists, bipartition))
        except InvalidArgument as exc:
            raise ParseError(f"profile {label}: {exc}") from None
    return IncrementalInstance(built[0], built[1], m1, k, frozenset(norm_pair(*p) for p in forced), tuple(names))


def format_list(pl: PreferenceList, names: Sequence[str]) -> str:
    parts = []
    for tier in pl.tiers:
        if len(tier) == 1:
            parts.append(names[tier[0]])
        else:
            parts.append("( " + " ".join(names[x] for x in tier) + " )")
    return " > ".join(parts)


def format_pairs(pairs: Iterable[tuple[int, int]], names: Sequence[str]) -> str:
    return " ".join(f"{names[a]}-{names[b]}" for a, b in sorted(pairs))


def serialize_instance(instance: IncrementalInstance) -> str:
    names = instance.agent_names()
    for name in names:
        if not _NAME.fullmatch(name) or name in _RESERVED:
            raise InvalidArgument(f"agent name {name!r} cannot be written to the text format")
    out = ["agents: " + " ".join(names)]
    bip = instance.profile1.bipartition
    if bip is not None:
        out.append(
            "bipartition: "
            + " ".join(names[a] for a in sorted(bip[0]))
            + " | "
            + " ".join(names[a] for a in sorted(bip[1]))
        )
    for label, profile in (("P1", instance.profile1), ("P2", instance.profile2)):
        out.append(f"profile {label}:")
        for a in range(profile.n):
            body = format_list(profile[a], names)
            out.append(f"{names[a]}: {body}" if body else f"{names[a]}:")
    out.append("matching M1: " + format_pairs(instance.m1.pairs, names))
    out.append(f"k: {instance.k}")
    if instance.forced:
        out.append("forced: " + format_pairs(instance.forced, names))
    return "\n".join(line.rstrip() for line in out) + "\n"


def parse_matching(text: str, instance: IncrementalInstance) -> Matching:
    """A matching file: either a result document or ``a-b`` pairs, optionally after ``matching ...:``."""
    names = instance.agent_names()
    ids = {name: a for a, name in enumerate(names)}
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", exc.lineno) from None
        pairs = []
        for entry in doc.get("matching") or []:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ParseError("matching entries must be two-name lists")
            pairs.append(_parse_pair(f"{entry[0]}-{entry[1]}", ids, None))
        return _matching(pairs, names, None)
    pairs = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if ":" in line:
            head, _, line = line.partition(":")
            if not head.strip().startswith("matching"):
                raise ParseError(f"unknown key {head.strip()!r}", number)
        pairs += parse_pairs(line, ids, number)
    return _matching(pairs, names, None)


def parse_graph(text: str) -> ColoredGraph:
    """Graph file with ``colors:``, ``size:`` and ``edges:`` followed by ``c.i c'.j`` lines."""
    colors = size = None
    edges: list[tuple[tuple[int, int], tuple[int, int]]] = []
    in_edges = False

    def vertex(tok: str, number: int) -> tuple[int, int]:
        m = re.fullmatch(r"(\d+)\.(\d+)", tok)
        if not m:
            raise ParseError(f"vertex {tok!r} must look like color.index", number)
        return int(m.group(1)), int(m.group(2))

    def add_edges(tokens: list[str], number: int) -> None:
        if len(tokens) % 2:
            raise ParseError("edges come as pairs of vertices", number)
        for x in range(0, len(tokens), 2):
            edges.append((vertex(tokens[x], number), vertex(tokens[x + 1], number)))

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if ":" in line:
            key, _, rest = line.partition(":")
            key, rest = key.strip(), rest.strip()
            if key in ("colors", "size"):
                if not re.fullmatch(r"\d+", rest):
                    raise ParseError(f"{key} must be a positive integer", number)
                if key == "colors":
                    colors = int(rest)
                else:
                    size = int(rest)
                in_edges = False
            elif key == "edges":
                in_edges = True
                add_edges(rest.split(), number)
            else:
                raise ParseError(f"unknown key {key!r}", number)
        elif in_edges:
            add_edges(line.split(), number)
        else:
            raise ParseError(f"unexpected line {line!r}", number)
    if colors is None or size is None:
        raise ParseError("graph file needs 'colors:' and 'size:' lines")
    return ColoredGraph(colors, size, tuple(edges))


def result_document(
    instance: IncrementalInstance, outcome: Outcome, algorithm: str, elapsed_ms: int
) -> dict:
    """The solver result in output form; names replace ids."""
    names = instance.agent_names()
    if isinstance(outcome, Infeasible):
        return {
            "feasible": False,
            "matching": [],
            "symmetric_difference": None,
            "algorithm": algorithm,
            "elapsed_ms": elapsed_ms,
        }
    return {
        "feasible": outcome.within_budget,
        "matching": [[names[a], names[b]] for a, b in outcome.matching.pairs],
        "symmetric_difference": outcome.diff,
        "algorithm": algorithm,
        "elapsed_ms": elapsed_ms,
    }


def dump_document(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"
