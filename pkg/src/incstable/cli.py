"""Command-line driver: solve, enumerate, generate and verify."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from . import gadgets, textio
from .incremental import DEFAULT_GUESS_LIMIT, solve_ism, solve_isr_xp
from .model import (
    IncrementalInstance,
    Infeasible,
    InternalError,
    InvalidArgument,
    NoneExists,
    Outcome,
    ResourceLimit,
    Solution,
    blocking_pairs,
    diff_count,
    is_valid_matching,
    require_valid,
)
from .oracle import DEFAULT_MAX_AGENTS, enumerate_stable
from .structured import (
    DEFAULT_MAX_OUTLIERS,
    detect_master_lists,
    outlier_partition,
    solve_isr_outliers,
    solve_strict_master_list,
    solve_weak_master_list_complete,
)
from .ties import (
    DEFAULT_MAX_TIE_SIZE,
    DEFAULT_MAX_TIED_AGENTS,
    solve_ismt_tiebreak,
    solve_ismt_xp,
)

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

ALGORITHMS = (
    "auto",
    "oracle",
    "isr-xp",
    "ism",
    "ismt-xp",
    "ismt-tiebreak",
    "master-strict",
    "master-weak",
    "outliers",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit with 1, not argparse's 2
        raise UsageError(message)


def solve_with_forced(instance: IncrementalInstance, max_agents: int, limit: int | None) -> Outcome:
    """Oracle restricted to stable matchings that keep every forced pair."""
    stable = [
        m
        for m in enumerate_stable(instance.profile2, max_agents=max_agents, limit=limit)
        if all(p in m for p in instance.forced)
    ]
    if not stable:
        return Infeasible("no stable matching keeps the forced pairs")
    best = min(stable, key=lambda m: (diff_count(instance.m1, m), m.pairs))
    return Solution(best, diff_count(instance.m1, best), instance.k)


def route(instance: IncrementalInstance, max_agents: int = DEFAULT_MAX_AGENTS) -> str:
    """Pick the first applicable algorithm, from most to least specialized."""
    p1, p2 = instance.profile1, instance.profile2
    if instance.forced:
        if instance.n <= max_agents:
            return "oracle"
        raise InvalidArgument("no applicable algorithm: forced pairs need the oracle, and the instance is too large")
    master = detect_master_lists(p2)
    if master is not None and master.strict and p2.is_strict:
        return "master-strict"
    if master is not None and not p2.is_bipartite and p2.is_complete():
        return "master-weak"
    if p2.is_bipartite and p1.is_bipartite:
        if p2.is_strict:
            return "ism"
        if len(p2.tied_agents()) <= DEFAULT_MAX_TIED_AGENTS:
            return "ismt-xp"
        if sum(pl.tie_size_sum for pl in p2.lists) <= DEFAULT_MAX_TIE_SIZE:
            return "ismt-tiebreak"
    if p1.is_strict and p2.is_strict:
        return "isr-xp"
    if instance.n <= max_agents:
        return "oracle"
    raise InvalidArgument("no applicable algorithm")


def run_algorithm(
    name: str,
    instance: IncrementalInstance,
    limit: int | None = None,
    outliers: Sequence[int] | None = None,
    max_agents: int = DEFAULT_MAX_AGENTS,
) -> tuple[str, Outcome]:
    """Run ``name`` (resolving ``auto``); returns the algorithm actually used and its outcome."""
    if name == "auto":
        name = route(instance, max_agents)
        if name == "isr-xp":
            try:
                return name, solve_isr_xp(instance, limit if limit is not None else DEFAULT_GUESS_LIMIT)
            except ResourceLimit:
                if instance.n > max_agents:
                    raise InvalidArgument("no applicable algorithm: guess space too large for isr-xp") from None
                name = "oracle"
    if instance.forced and name != "oracle":
        raise InvalidArgument(f"algorithm {name} does not support forced pairs; use oracle")
    solvers: dict[str, Callable[[], Outcome]] = {
        "oracle": lambda: solve_with_forced(instance, max_agents, limit),
        "isr-xp": lambda: solve_isr_xp(instance, limit if limit is not None else DEFAULT_GUESS_LIMIT),
        "ism": lambda: solve_ism(instance),
        "ismt-xp": lambda: solve_ismt_xp(instance, limit if limit is not None else DEFAULT_MAX_TIED_AGENTS),
        "ismt-tiebreak": lambda: solve_ismt_tiebreak(instance, limit if limit is not None else DEFAULT_MAX_TIE_SIZE),
        "master-strict": lambda: solve_strict_master_list(instance),
        "master-weak": lambda: solve_weak_master_list_complete(instance),
        "outliers": lambda: solve_isr_outliers(
            instance,
            outlier_partition(instance.profile2, outliers) if outliers is not None else None,
            limit if limit is not None else DEFAULT_MAX_OUTLIERS,
        ),
    }
    if name not in solvers:
        raise InvalidArgument(f"unknown algorithm {name!r}")
    return name, solvers[name]()


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidArgument(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InvalidArgument(f"cannot write {path}: {exc.strerror}") from None


def _load(path: str) -> IncrementalInstance:
    instance = textio.parse_instance(_read(path))
    require_valid(instance)
    return instance


def _names_to_ids(instance: IncrementalInstance, text: str) -> list[int]:
    ids = {name: a for a, name in enumerate(instance.agent_names())}
    out = []
    for tok in text.replace(",", " ").split():
        if tok not in ids:
            raise InvalidArgument(f"unknown agent {tok!r}")
        out.append(ids[tok])
    return out


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _load(args.input)
    outliers = _names_to_ids(instance, args.outliers) if args.outliers is not None else None
    start = time.perf_counter()
    used, outcome = run_algorithm(args.algorithm, instance, args.limit, outliers, args.max_agents)
    elapsed = 0 if args.no_timing else int(round((time.perf_counter() - start) * 1000))
    doc = textio.result_document(instance, outcome, used, elapsed)
    sys.stdout.write(textio.dump_document(doc))
    return EXIT_OK if doc["feasible"] else EXIT_INFEASIBLE


def cmd_enumerate(args: argparse.Namespace) -> int:
    instance = _load(args.input)
    names = instance.agent_names()
    found = enumerate_stable(instance.profile2, max_agents=args.max_agents, limit=args.limit)
    doc = {
        "count": len(found),
        "matchings": [
            {
                "matching": [[names[a], names[b]] for a, b in m.pairs],
                "symmetric_difference": diff_count(instance.m1, m),
            }
            for m in found
        ],
    }
    sys.stdout.write(textio.dump_document(doc))
    return EXIT_OK if found else EXIT_INFEASIBLE


def cmd_generate(args: argparse.Namespace) -> int:
    if args.kind == "clique":
        spec = gadgets.gen_isr_from_clique(textio.parse_graph(_read(args.graph)))
        instance = spec.instance
    else:
        source = _load(args.input)
        if args.kind == "forced-pairs":
            instance = gadgets.apply_forced_pair_gadget(source)
        else:
            ids = {name: a for a, name in enumerate(source.agent_names())}
            pairs = textio.parse_pairs(args.pairs, ids)
            instance = gadgets.apply_forbidden_pairs_gadget(source, pairs)
    _write(args.out, textio.serialize_instance(instance))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    instance = _load(args.input)
    matching = textio.parse_matching(_read(args.matching), instance)
    names = instance.agent_names()
    p2 = instance.profile2
    valid = is_valid_matching(p2, matching)
    blocking = blocking_pairs(p2, matching) if valid else []
    diff = diff_count(instance.m1, matching)
    stable = valid and not blocking
    doc = {
        "valid": valid,
        "stable": stable,
        "blocking_pairs": [[names[a], names[b]] for a, b in blocking],
        "symmetric_difference": diff,
        "k": instance.k,
        "within_budget": diff <= instance.k,
        "forced_pairs_kept": all(p in matching for p in instance.forced),
    }
    sys.stdout.write(textio.dump_document(doc))
    ok = stable and doc["within_budget"] and doc["forced_pairs_kept"]
    return EXIT_OK if ok else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="incstable", description="Incremental stable matching solvers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = sub.add_parser("solve", help="closest stable matching of P2 to M1")
    solve.add_argument("--input", required=True)
    solve.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    solve.add_argument("--outliers", help="comma- or space-separated outlier agent names")
    solve.add_argument("--limit", type=int, help="cap on enumeration or guess sizes")
    solve.add_argument("--max-agents", type=int, default=DEFAULT_MAX_AGENTS, help="oracle size bound")
    solve.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0")
    solve.set_defaults(run=cmd_solve)

    enum = sub.add_parser("enumerate", help="all stable matchings of P2")
    enum.add_argument("--input", required=True)
    enum.add_argument("--limit", type=int)
    enum.add_argument("--max-agents", type=int, default=DEFAULT_MAX_AGENTS)
    enum.set_defaults(run=cmd_enumerate)

    gen = sub.add_parser("generate", help="build a reduction instance")
    kinds = gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    clique = kinds.add_parser("clique")
    clique.add_argument("--graph", required=True)
    clique.add_argument("--out", required=True)
    forced = kinds.add_parser("forced-pairs")
    forced.add_argument("--input", required=True)
    forced.add_argument("--out", required=True)
    forbidden = kinds.add_parser("forbidden-pairs")
    forbidden.add_argument("--input", required=True)
    forbidden.add_argument("--pairs", required=True, help="pairs as a-b, comma separated")
    forbidden.add_argument("--out", required=True)
    gen.set_defaults(run=cmd_generate)

    verify = sub.add_parser("verify", help="check a matching against P2 and the budget")
    verify.add_argument("--input", required=True)
    verify.add_argument("--matching", required=True)
    verify.set_defaults(run=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "limit", None) is not None and args.limit < 0:
            raise UsageError("--limit must be non-negative")
        return args.run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ResourceLimit as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (InvalidArgument, NoneExists) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
