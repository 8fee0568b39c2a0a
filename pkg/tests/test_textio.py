import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_bipartite, random_incremental
from incstable.gadgets import ColoredGraph, apply_forced_pair_gadget, gen_isr_from_clique
from incstable.model import IncrementalInstance, Infeasible, InvalidArgument, Matching, Solution
from incstable.oracle import enumerate_stable
from incstable.textio import (
    ParseError,
    dump_document,
    format_list,
    parse_graph,
    parse_instance,
    parse_matching,
    parse_pairs,
    result_document,
    serialize_instance,
)

SAMPLE = """\
# two men, two women
agents: m1 m2 w1 w2
bipartition: m1 m2 | w1 w2
profile P1:
m1: w1 > w2
m2: w1 > w2
w1: m1 > m2
w2: ( m1 m2 )
profile P2:
m1: w2 > w1
m2: w1 > w2
w1: m1 > m2
w2: ( m1 m2 )
matching M1: m1-w1 m2-w2
k: 4
"""


def _same(a: IncrementalInstance, b: IncrementalInstance) -> bool:
    return (a.profile1, a.profile2, a.m1, a.k, a.forced, a.agent_names()) == (
        b.profile1,
        b.profile2,
        b.m1,
        b.k,
        b.forced,
        b.agent_names(),
    )


class TestParseInstance:
    def test_sample(self):
        inst = parse_instance(SAMPLE)
        assert inst.agent_names() == ("m1", "m2", "w1", "w2")
        assert inst.profile1.bipartition == (frozenset({0, 1}), frozenset({2, 3}))
        assert inst.profile1[3].tiers == ((0, 1),)
        assert inst.profile2[0].order() == [3, 2]
        assert inst.m1 == Matching([(0, 2), (1, 3)]) and inst.k == 4 and not inst.forced

    def test_missing_list_means_empty(self):
        inst = parse_instance("agents: a b c\nprofile P1:\na: b\nb: a\nprofile P2:\na: b\nb: a\nmatching M1: a-b\nk: 0\n")
        assert len(inst.profile1[2]) == 0

    def test_forced_pairs(self):
        inst = parse_instance(SAMPLE + "forced: w2-m2\n")
        assert inst.forced == frozenset({(1, 3)})

    @pytest.mark.parametrize(
        "text,line,fragment",
        [
            (SAMPLE.replace("k: 4", "k: -1"), 15, "non-negative"),
            (SAMPLE.replace("m1: w1 > w2\nm2", "m1: w1 > w9\nm2", 1), 5, "unknown agent 'w9'"),
            (SAMPLE.replace("m1: w1 > w2\nm2", "m1: w1 > w1\nm2", 1), 5, "listed twice"),
            (SAMPLE.replace("w2: ( m1 m2 )", "w2: ( m1 m2", 1), 8, "unclosed"),
            (SAMPLE.replace("m1: w1 > w2\nm2", "m1: w1 w2\nm2", 1), 5, "expected '>'"),
            (SAMPLE.replace("m1: w1 > w2\nm2", "m1: w1 >\nm2", 1), 5, "ends with"),
            (SAMPLE + "k: 3\n", 16, "duplicate section"),
            (SAMPLE + "colour: red\n", 16, "unknown key"),
            (SAMPLE.replace("matching M1: m1-w1 m2-w2", "matching M1: m1-w1 m1-w2"), 14, "matched twice"),
            (SAMPLE.replace("agents: m1 m2 w1 w2", "agents: m1 m1 w1 w2"), 2, "declared twice"),
            (SAMPLE.replace("agents: m1 m2 w1 w2", "agents: m1 k w1 w2"), 2, "reserved"),
            (SAMPLE.replace("bipartition: m1 m2 | w1 w2", "bipartition: m1 | w1 w2"), 3, "every agent"),
            (SAMPLE.replace("profile P1:\nm1: w1 > w2", "profile P1:\nm1: w1 > w2\nm1: w2"), 6, "second list"),
            ("profile P1:\n", 1, "must come first"),
            (SAMPLE.replace("m1: w1 > w2\nm2", "m1 w1 > w2\nm2", 1), 5, "key: value"),
        ],
    )
    def test_errors_name_the_line(self, text, line, fragment):
        with pytest.raises(ParseError) as info:
            parse_instance(text)
        assert info.value.line == line
        assert fragment in str(info.value)
        assert str(info.value).startswith(f"line {line}:")

    @pytest.mark.parametrize("drop", ["matching M1:", "k:", "profile P2:"])
    def test_missing_sections(self, drop):
        kept = SAMPLE.split(drop)[0] if drop == "profile P2:" else "\n".join(
            x for x in SAMPLE.splitlines() if not x.startswith(drop)
        )
        with pytest.raises(ParseError, match="missing"):
            parse_instance(kept)

    def test_self_listing_is_a_profile_error(self):
        with pytest.raises(ParseError, match="profile P1"):
            parse_instance(SAMPLE.replace("m1: w1 > w2\nm2", "m1: m1 > w2\nm2", 1))

    def test_parse_error_is_invalid_argument(self):
        assert issubclass(ParseError, InvalidArgument)


class TestRoundTrip:
    def test_sample(self):
        inst = parse_instance(SAMPLE)
        text = serialize_instance(inst)
        assert parse_instance(text) == inst
        assert serialize_instance(parse_instance(text)) == text

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.booleans())
    def test_random_roommates(self, seed, complete):
        rng = random.Random(seed)
        inst = random_incremental(rng, rng.randint(3, 7), complete=complete)
        assert _same(parse_instance(serialize_instance(inst)), inst)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_bipartite_with_ties(self, seed):
        rng = random.Random(seed)
        p = random_bipartite(rng, 3, 4, density=0.7, ties=3)
        inst = IncrementalInstance(p, p, enumerate_stable(p)[0], 2)
        back = parse_instance(serialize_instance(inst))
        assert _same(back, inst) and back.profile1.bipartition == p.bipartition

    def test_generated_clique_instance(self):
        spec = gen_isr_from_clique(ColoredGraph(2, 1, (((1, 1), (2, 1)),)))
        back = parse_instance(serialize_instance(spec.instance))
        assert _same(back, spec.instance)
        assert back.agent_names() == spec.instance.agent_names()

    def test_generated_forced_instance(self):
        inst = parse_instance(SAMPLE.replace("k: 4", "k: 1") + "forced: m2-w2\n")
        gadget = apply_forced_pair_gadget(inst)
        assert _same(parse_instance(serialize_instance(gadget)), gadget)

    def test_format_list(self):
        inst = parse_instance(SAMPLE)
        assert format_list(inst.profile1[3], inst.agent_names()) == "( m1 m2 )"
        assert format_list(inst.profile1[0], inst.agent_names()) == "w1 > w2"


class TestMatchingFiles:
    def test_plain_pairs(self):
        inst = parse_instance(SAMPLE)
        assert parse_matching("matching M2: m1-w2, m2-w1\n", inst) == Matching([(0, 3), (1, 2)])
        assert parse_matching("m1-w2\nm2-w1\n", inst) == Matching([(0, 3), (1, 2)])

    def test_result_document(self):
        inst = parse_instance(SAMPLE)
        doc = result_document(inst, Solution(Matching([(0, 3), (1, 2)]), 4, 4), "ism", 0)
        assert parse_matching(dump_document(doc), inst) == Matching([(0, 3), (1, 2)])

    def test_errors(self):
        inst = parse_instance(SAMPLE)
        with pytest.raises(ParseError):
            parse_matching("m1-w2-w1\n", inst)
        with pytest.raises(ParseError):
            parse_matching('{"matching": [["m1"]]}', inst)
        with pytest.raises(ParseError) as info:
            parse_matching("m1-w1\nfoo: m2-w2\n", inst)
        assert info.value.line == 2

    def test_parse_pairs_separators(self):
        ids = {"a": 0, "b": 1, "c": 2, "d": 3}
        assert parse_pairs("a-b,c-d", ids) == parse_pairs("a-b  c-d", ids) == [(0, 1), (2, 3)]


class TestDocuments:
    def test_feasible_fields(self):
        inst = parse_instance(SAMPLE)
        doc = result_document(inst, Solution(Matching([(0, 3), (1, 2)]), 4, 3), "ism", 12)
        assert doc == {
            "feasible": False,
            "matching": [["m1", "w2"], ["m2", "w1"]],
            "symmetric_difference": 4,
            "algorithm": "ism",
            "elapsed_ms": 12,
        }

    def test_infeasible(self):
        doc = result_document(parse_instance(SAMPLE), Infeasible(), "oracle", 0)
        assert doc["feasible"] is False and doc["symmetric_difference"] is None and doc["matching"] == []

    def test_dump_is_json(self):
        doc = result_document(parse_instance(SAMPLE), Infeasible(), "oracle", 0)
        assert json.loads(dump_document(doc)) == doc


class TestGraphFiles:
    def test_parse(self):
        g = parse_graph("colors: 2\nsize: 2\nedges:\n1.1 2.1\n1.2 2.2\n")
        assert g == ColoredGraph(2, 2, (((1, 1), (2, 1)), ((1, 2), (2, 2))))

    def test_edges_inline(self):
        assert parse_graph("colors: 2\nsize: 1\nedges: 1.1 2.1\n").edges == (((1, 1), (2, 1)),)

    @pytest.mark.parametrize(
        "text,line",
        [("colors: two\nsize: 1\n", 1), ("colors: 2\nsize: 1\nedges:\n1.1\n", 4), ("colors: 2\nsize: 1\nedges:\n1-1 2.1\n", 4), ("x: 1\n", 1)],
    )
    def test_errors(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_graph(text)
        assert info.value.line == line

    def test_irregular_graph_rejected(self):
        with pytest.raises(InvalidArgument):
            parse_graph("colors: 2\nsize: 2\nedges:\n1.1 2.1\n")
