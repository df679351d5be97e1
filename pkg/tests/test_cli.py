import json

import pytest

from conftest import make_instance
from tscu.cli import check_agreement, choose_algo, format_rows, main, measure, read_manifest, run_bench
from tscu.core import TscuError, parse_instance, serialize_instance
from tscu.generators import RandomParams, gen_random, is_bipartite


@pytest.fixture
def corpus_dir(fixtures_dir):
    return fixtures_dir / "corpus"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# solve


def test_solve_brute_p3(capsys, corpus_dir):
    code, out, _ = run(capsys, "solve", "--algo", "brute", corpus_dir / "p3.tscu")
    assert code == 0 and out.strip() == "YES 1"


def test_solve_writes_solution_that_verifies(capsys, corpus_dir, tmp_path):
    sol = tmp_path / "p3.sol"
    run(capsys, "solve", "--algo", "treewidth", corpus_dir / "p3.tscu", "-s", sol)
    code, out, _ = run(capsys, "verify", corpus_dir / "p3.tscu", sol)
    assert code == 0 and out.strip() == "valid 1"


def test_solve_cograph_cap_zero_is_inapplicable(capsys, corpus_dir):
    code, out, _ = run(capsys, "solve", "--algo", "cograph", "--modulator-cap", "0", corpus_dir / "p4heavy.tscu")
    assert code == 2 and "no modulator within cap" in out


def test_solve_no_exit_code(capsys, corpus_dir):
    code, out, _ = run(capsys, "solve", "--algo", "brute", corpus_dir / "c4_interleaved.tscu")
    assert code == 1 and out.strip() == "NO"


def test_auto_picks_treewidth_on_tree(capsys, corpus_dir):
    code, _, err = run(capsys, "solve", "-v", corpus_dir / "tree20.tscu")
    assert code in (0, 1) and "c algo treewidth" in err
    inst = parse_instance((corpus_dir / "tree20.tscu").read_text())
    assert choose_algo(inst, measure(inst)) == "treewidth"


def test_solve_with_supplied_td(capsys, tmp_path, corpus_dir):
    td = tmp_path / "p3.td"
    td.write_text("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n")
    code, out, _ = run(capsys, "solve", "--algo", "treewidth", "--td", td, corpus_dir / "p3.tscu")
    assert code == 0 and out.strip() == "YES 1"


def test_missing_file_is_error(capsys, tmp_path):
    code, _, err = run(capsys, "solve", tmp_path / "nope.tscu")
    assert code == 2 and err.startswith("error:")


# verify


def test_verify_exit_codes(capsys, tmp_path, corpus_dir):
    good = tmp_path / "good.sol"
    good.write_text("r 1\n")
    bad = tmp_path / "bad.sol"
    bad.write_text("r 1\nr 3\n")
    broken = tmp_path / "broken.sol"
    broken.write_text("x 1\n")
    p3 = corpus_dir / "p3.tscu"
    assert run(capsys, "verify", p3, good)[:2] == (0, "valid 1\n")
    code, out, _ = run(capsys, "verify", p3, bad)
    assert code == 1 and "T not blue" in out
    assert run(capsys, "verify", p3, broken)[0] == 2


# kernelize


def test_kernelize_fes_report(capsys, tmp_path):
    src = tmp_path / "in.tscu"
    src.write_text(serialize_instance(make_instance(5, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (4, 5)],
                                                    {1}, {2})))
    out, report = tmp_path / "out.tscu", tmp_path / "report.json"
    code, _, _ = run(capsys, "kernelize", "--rules", "fes", src, "-o", out, "--report", report)
    assert code == 0
    assert parse_instance(out.read_text()).graph.n == 4
    data = json.loads(report.read_text())
    assert data["input_n"] == 5 and data["output_n"] == 4 and data["rule_R1"] == 1


def test_kernelize_trivial_writes_tiny_instance(capsys, tmp_path, corpus_dir):
    out = tmp_path / "out.tscu"
    run(capsys, "kernelize", corpus_dir / "p3.tscu", "-o", out)
    tiny = parse_instance(out.read_text())
    assert tiny.graph.n == 2
    assert run(capsys, "solve", "--algo", "brute", out)[0] == run(capsys, "solve", "--algo", "brute",
                                                                  corpus_dir / "p3.tscu")[0]


def test_kernelize_vc_rejects_budget(capsys, tmp_path):
    src = tmp_path / "p3.tscu"
    src.write_text(serialize_instance(make_instance(3, [(1, 2), (2, 3)], {1}, {3}, 1)))
    code, _, err = run(capsys, "kernelize", "--rules", "vc2dcs", src)
    assert code == 2 and err.startswith("error:")


# generate and transform


def test_generate_random_is_seeded(capsys):
    a = run(capsys, "generate", "random", "--kind", "connected", "--n", "7", "--seed", "3")[1]
    b = run(capsys, "generate", "random", "--kind", "connected", "--n", "7", "--seed", "3")[1]
    assert a == b
    assert parse_instance(a) == gen_random("connected", RandomParams(n=7), 3)


def test_generate_sat34(capsys, fixtures_dir):
    code, out, _ = run(capsys, "generate", "sat34", "--cnf", fixtures_dir / "cnf" / "two_xor.cnf")
    assert code == 0
    inst = parse_instance(out)
    assert max(inst.graph.degree(v) for v in range(inst.graph.n)) == 3


def test_generate_mcc(capsys, fixtures_dir):
    mcc = fixtures_dir / "mcc"
    code, out, _ = run(capsys, "generate", "mcc", "--graph", mcc / "c4.tscu", "--classes", mcc / "c4.classes")
    assert code == 0 and out.startswith("c c1 8\n")
    assert parse_instance(out).ell == 34


def test_transform_bipartite(capsys, tmp_path):
    src = tmp_path / "p3.tscu"
    src.write_text(serialize_instance(make_instance(3, [(1, 2), (2, 3)], {1}, {3})))
    code, out, _ = run(capsys, "transform", "bipartite", src)
    inst = parse_instance(out)
    assert code == 0 and inst.graph.n == 11 and is_bipartite(inst.graph)


# bench


def test_bench_empty_manifest(capsys, tmp_path):
    manifest = tmp_path / "empty.manifest"
    manifest.write_text("")
    code, out, _ = run(capsys, "bench", manifest)
    assert code == 0 and out == "instance,algo,verdict,optimum,ms,params\n"


def test_bench_timeout_row(tmp_path):
    inst = gen_random("connected", RandomParams(n=20, p=0.3, s=1, t=1), 9)
    path = tmp_path / "big.tscu"
    path.write_text(serialize_instance(inst))
    (tmp_path / "m.manifest").write_text("big.tscu brute\n")
    rows = run_bench(read_manifest(str(tmp_path / "m.manifest")), timeout=0.001)
    assert [r["verdict"] for r in rows] == ["TIMEOUT"]


def test_bench_inapplicable_row(tmp_path):
    # a star with eight leaves has independence number 8, above the cap
    star = make_instance(9, [(1, k) for k in range(2, 10)], {2}, {3})
    (tmp_path / "star.tscu").write_text(serialize_instance(star))
    (tmp_path / "m.manifest").write_text("star.tscu indset,brute\n")
    rows = run_bench(read_manifest(str(tmp_path / "m.manifest")), timeout=30)
    assert [r["verdict"] for r in rows] == ["N/A", "YES"]
    assert "exceeds cap" in rows[0]["params"]
    assert check_agreement(rows) == []


def test_bench_manifest_errors(tmp_path):
    bad = tmp_path / "bad.manifest"
    bad.write_text("p3.tscu magic\n")
    with pytest.raises(TscuError):
        read_manifest(str(bad))


def test_agreement_detects_mismatch():
    rows = [
        {"instance": "a", "algo": "brute", "verdict": "YES", "optimum": 2},
        {"instance": "a", "algo": "treewidth", "verdict": "YES", "optimum": 3},
        {"instance": "a", "algo": "cograph", "verdict": "TIMEOUT", "optimum": ""},
    ]
    problems = check_agreement(rows)
    assert len(problems) == 1 and "treewidth says YES 3" in problems[0]


def test_markdown_format():
    rows = [{"instance": "a", "algo": "brute", "verdict": "NO", "optimum": "", "ms": "1.0", "params": ""}]
    text = format_rows(rows, "md")
    assert text.splitlines()[0] == "| instance | algo | verdict | optimum | ms | params |"
    assert text.splitlines()[2] == "| a | brute | NO |  | 1.0 |  |"
