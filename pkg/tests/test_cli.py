import json
import random
import subprocess
import sys

import pytest

from gen import random_bipartite, random_incremental, weak_master_profile
from incstable.cli import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, main, route, run_algorithm
from incstable.model import IncrementalInstance
from incstable.oracle import enumerate_stable
from incstable.textio import parse_instance, serialize_instance

FORMAT_EXAMPLE = """\
agents: a b c d
bipartition: a b | c d          # optional
profile P1:
a: c > d
b: ( c d )                      # parentheses delimit a tie
c: a > b
d: b > a
profile P2:
a: d > c
b: ( c d )
c: a > b
d: b > a
matching M1: a-c b-d
k: 2
"""


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _write(tmp_path, text, name="inst.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestSolve:
    def test_format_example(self, tmp_path, capsys):
        inst = parse_instance(FORMAT_EXAMPLE)
        assert inst.n == 4 and inst.k == 2 and inst.profile1[1].tie_count == 1
        code, out, _ = _run(capsys, "solve", "--input", _write(tmp_path, FORMAT_EXAMPLE), "--no-timing")
        doc = json.loads(out)
        assert set(doc) == {"feasible", "matching", "symmetric_difference", "algorithm", "elapsed_ms"}
        assert doc["algorithm"] == "ismt-xp" and doc["elapsed_ms"] == 0
        assert (code == EXIT_OK) == doc["feasible"]
        assert doc["matching"] == sorted(doc["matching"])

    def test_over_budget_exits_2(self, tmp_path, capsys):
        text = (
            "agents: m n v w\nbipartition: m n | v w\nprofile P1:\nm: v > w\nn: v > w\nv: m > n\nw: m > n\n"
            "profile P2:\nm: w > v\nn: v > w\nv: m > n\nw: m > n\nmatching M1: m-v n-w\nk: 0\n"
        )
        code, out, _ = _run(capsys, "solve", "--input", _write(tmp_path, text), "--no-timing")
        doc = json.loads(out)
        assert code == EXIT_INFEASIBLE and not doc["feasible"]
        assert doc["symmetric_difference"] == 4 and doc["matching"] == [["m", "w"], ["n", "v"]]

    def test_no_stable_matching_exits_2(self, tmp_path, capsys):
        text = (
            "agents: a b c\nprofile P1:\na: b > c\nb: a > c\nc: a > b\n"
            "profile P2:\na: b > c\nb: c > a\nc: a > b\nmatching M1: a-b\nk: 5\n"
        )
        code, out, _ = _run(capsys, "solve", "--input", _write(tmp_path, text))
        assert code == EXIT_INFEASIBLE
        assert json.loads(out)["symmetric_difference"] is None

    @pytest.mark.parametrize(
        "argv",
        [
            ["solve"],
            ["solve", "--input", "missing.txt"],
            ["solve", "--input", "{inst}", "--algorithm", "magic"],
            ["solve", "--input", "{inst}", "--limit", "-3"],
            ["solve", "--input", "{inst}", "--algorithm", "ism"],
            ["bogus"],
        ],
    )
    def test_usage_and_input_errors_exit_1(self, tmp_path, capsys, argv):
        path = _write(tmp_path, FORMAT_EXAMPLE)
        code, out, err = _run(capsys, *[a.replace("{inst}", path) for a in argv])
        assert code == EXIT_ERROR and out == "" and err

    def test_parse_error_reports_line(self, tmp_path, capsys):
        bad = FORMAT_EXAMPLE.replace("c: a > b\nd", "c: a > z\nd", 1)
        code, _, err = _run(capsys, "solve", "--input", _write(tmp_path, bad))
        assert code == EXIT_ERROR and "line 6" in err

    def test_limit_exceeded_is_an_error(self, tmp_path, capsys):
        inst = random_incremental(random.Random(4), 8, complete=True, swaps=2)
        code, out, err = _run(
            capsys, "solve", "--input", _write(tmp_path, serialize_instance(inst)), "--algorithm", "oracle", "--limit", "0"
        )
        assert code == EXIT_ERROR and out == "" and "limit" in err

    def test_outliers_option(self, tmp_path, capsys):
        text = (
            "agents: a b c d\nprofile P1:\na: b > c > d\nb: a > c > d\nc: a > b > d\nd: c > b > a\n"
            "profile P2:\na: b > c > d\nb: a > c > d\nc: a > b > d\nd: c > b > a\nmatching M1: a-b c-d\nk: 0\n"
        )
        code, out, _ = _run(
            capsys, "solve", "--input", _write(tmp_path, text), "--algorithm", "outliers", "--outliers", "d"
        )
        doc = json.loads(out)
        assert code == EXIT_OK and doc["algorithm"] == "outliers" and doc["symmetric_difference"] == 0

    def test_forced_pairs_route_to_oracle(self, tmp_path, capsys):
        text = FORMAT_EXAMPLE + "forced: a-c\n"
        code, out, _ = _run(capsys, "solve", "--input", _write(tmp_path, text))
        doc = json.loads(out)
        assert doc["algorithm"] == "oracle"
        if doc["matching"]:
            assert ["a", "c"] in doc["matching"]


class TestRouting:
    def test_strict_master(self):
        inst = parse_instance(
            "agents: a b c\nprofile P1:\na: b > c\nb: a > c\nc: a > b\n"
            "profile P2:\na: b > c\nb: a > c\nc: a > b\nmatching M1: a-b\nk: 0\n"
        )
        assert route(inst) == "master-strict"

    def test_weak_master(self):
        p, _ = weak_master_profile(random.Random(2), 6, 2)
        m = enumerate_stable(p)[0]
        assert route(IncrementalInstance(p, p, m, 0)) == "master-weak"

    def test_marriage(self):
        p = random_bipartite(random.Random(3), 3, 3)
        assert route(IncrementalInstance(p, p, enumerate_stable(p)[0], 0)) in ("ism", "master-strict")

    def test_roommates(self):
        rng = random.Random(5)
        while True:
            inst = random_incremental(rng, 6)
            if route(inst) == "isr-xp":
                break
        assert run_algorithm("auto", inst)[0] == "isr-xp"

    @pytest.mark.parametrize("seed", range(40))
    def test_auto_agrees_with_oracle(self, seed):
        rng = random.Random(seed)
        if seed % 2:
            inst = random_incremental(rng, rng.randint(3, 8), complete=seed % 4 == 1)
        else:
            p1 = random_bipartite(rng, 4, 4, ties=0)
            p2 = random_bipartite(rng, 4, 4, ties=2)
            inst = IncrementalInstance(p1, p2 if p2.pairs() == p1.pairs() else p1, enumerate_stable(p1)[0], 3)
        used, auto = run_algorithm("auto", inst)
        _, oracle = run_algorithm("oracle", inst)
        assert getattr(auto, "diff", None) == getattr(oracle, "diff", None)
        assert getattr(auto, "within_budget", False) == getattr(oracle, "within_budget", False)


class TestEnumerate:
    def test_lists_all(self, tmp_path, capsys):
        code, out, _ = _run(capsys, "enumerate", "--input", _write(tmp_path, FORMAT_EXAMPLE))
        doc = json.loads(out)
        inst = parse_instance(FORMAT_EXAMPLE)
        assert code == EXIT_OK and doc["count"] == len(enumerate_stable(inst.profile2))
        assert all("symmetric_difference" in m for m in doc["matchings"])


class TestGenerateAndVerify:
    def test_clique(self, tmp_path, capsys):
        graph = _write(tmp_path, "colors: 2\nsize: 1\nedges:\n1.1 2.1\n", "g.txt")
        out = str(tmp_path / "out.txt")
        code, _, _ = _run(capsys, "generate", "clique", "--graph", graph, "--out", out)
        inst = parse_instance((tmp_path / "out.txt").read_text())
        assert code == EXIT_OK and inst.n == 2 * 14 + 4

    def test_forced_pairs(self, tmp_path, capsys):
        src = _write(tmp_path, FORMAT_EXAMPLE.replace("k: 2", "k: 1") + "forced: b-d\n")
        out = str(tmp_path / "out.txt")
        code, _, _ = _run(capsys, "generate", "forced-pairs", "--input", src, "--out", out)
        inst = parse_instance((tmp_path / "out.txt").read_text())
        assert code == EXIT_OK and inst.n == 4 + 12 and not inst.forced

    def test_forbidden_pairs(self, tmp_path, capsys):
        text = (
            "agents: a b c d\nbipartition: a b | c d\nprofile P1:\na: c > d\nb: c > d\nc: a > b\nd: a > b\n"
            "profile P2:\na: c > d\nb: c > d\nc: a > b\nd: a > b\nmatching M1: a-c b-d\nk: 0\n"
        )
        out = str(tmp_path / "out.txt")
        code, _, err = _run(capsys, "generate", "forbidden-pairs", "--input", _write(tmp_path, text), "--pairs", "a-d", "--out", out)
        assert code == EXIT_OK, err
        assert parse_instance((tmp_path / "out.txt").read_text()).n == 4 + 30

    def test_verify(self, tmp_path, capsys):
        inst_path = _write(tmp_path, FORMAT_EXAMPLE)
        _, solved, _ = _run(capsys, "solve", "--input", inst_path, "--algorithm", "oracle")
        doc = json.loads(solved)
        m_path = _write(tmp_path, solved, "m.json")
        code, out, _ = _run(capsys, "verify", "--input", inst_path, "--matching", m_path)
        report = json.loads(out)
        assert report["stable"] and report["symmetric_difference"] == doc["symmetric_difference"]
        assert (code == EXIT_OK) == report["within_budget"]

    def test_verify_unstable(self, tmp_path, capsys):
        inst_path = _write(tmp_path, FORMAT_EXAMPLE)
        m_path = _write(tmp_path, "a-c\n", "m.txt")
        code, out, _ = _run(capsys, "verify", "--input", inst_path, "--matching", m_path)
        report = json.loads(out)
        assert code == EXIT_INFEASIBLE and not report["stable"] and report["blocking_pairs"]


def test_module_entry_point(tmp_path):
    path = _write(tmp_path, FORMAT_EXAMPLE)
    done = subprocess.run(
        [sys.executable, "-m", "incstable", "solve", "--input", path, "--no-timing"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert done.returncode in (EXIT_OK, EXIT_INFEASIBLE)
    assert json.loads(done.stdout)["elapsed_ms"] == 0
