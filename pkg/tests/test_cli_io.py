import json
from pathlib import Path

import pytest

from qpcodes.cli import EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, EXIT_REFUTED, main
from qpcodes.code_metrics import Code, classify
from qpcodes.constructions import build_t53
from qpcodes.io import CodeFile, CodeFileError, build_report, loads_code_file, render
from qpcodes.product_graph import GraphSpecError, parse_graph_spec

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return status, out, err


@pytest.mark.parametrize(
    "name, status",
    [
        ("tile_perfect1.json", EXIT_OK),
        ("diag14_qp2.json", EXIT_OK),
        ("mesh_no_claim.json", EXIT_OK),
        ("tile_perfect2.json", EXIT_REFUTED),
        ("diag8_wrong_claim.json", EXIT_REFUTED),
        ("duplicate.json", EXIT_INPUT),
        ("out_of_range.json", EXIT_INPUT),
        ("bad_graph.json", EXIT_INPUT),
        ("bad_claim.json", EXIT_INPUT),
        ("extra_key.json", EXIT_INPUT),
        ("empty.json", EXIT_INPUT),
        ("truncated.json", EXIT_INPUT),
        ("missing.json", EXIT_INPUT),
    ],
)
def test_classify_golden_corpus(capsys, name, status):
    code, out, err = run(capsys, "classify", "--code", GOLDEN / name)
    assert code == status
    if status == EXIT_INPUT:
        assert err.startswith("error:")
    else:
        report = json.loads(out)
        assert ("verdict" in report) == (name != "mesh_no_claim.json")


def test_classify_report_fields(capsys):
    code, out, _ = run(capsys, "classify", "--code", GOLDEN / "tile_perfect1.json")
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["label"] == "perfect(1)"
    assert report["min_distance"] == 3
    assert report["covering_radius"] == 1
    assert report["histogram"] == [6, 30]
    assert report["verdict"] == "holds"
    assert report["code_size"] == 6
    assert set(report["witnesses"]) == {"closest_pair", "farthest_vertex"}


def test_classify_claim_flags_override_file(capsys):
    code, out, _ = run(capsys, "classify", "--code", GOLDEN / "tile_perfect2.json", "--kind", "perfect", "--e", "1")
    assert code == EXIT_OK
    code, _, _ = run(capsys, "classify", "--code", GOLDEN / "tile_perfect1.json", "--kind", "perfect")
    assert code == EXIT_INPUT


def test_classify_graph_mismatch(capsys):
    code, _, err = run(capsys, "classify", "--graph", "C3xC6xC3", "--code", GOLDEN / "tile_perfect1.json")
    assert code == EXIT_INPUT and "does not match" in err


def test_classify_text_format(capsys):
    code, out, _ = run(capsys, "classify", "--code", GOLDEN / "mesh_no_claim.json", "--format", "text")
    assert code == EXIT_OK
    assert "label: quasi_perfect(2)" in out.splitlines()


def test_singleton_reports_inf(capsys, tmp_path):
    path = tmp_path / "one.json"
    path.write_text(json.dumps({"graph": "P3xP3", "codewords": [[1, 1]]}))
    code, out, _ = run(capsys, "classify", "--code", path)
    assert code == EXIT_OK
    assert json.loads(out)["min_distance"] == "inf"


# -- construct / tile --------------------------------------------------------------


def test_construct_t35(capsys):
    code, out, _ = run(capsys, "construct", "--theorem", "T3_5", "--param", "k=1")
    report = json.loads(out)
    assert code == EXIT_OK
    assert report["code_size"] == 6 and report["verdict"] == "holds"
    assert report["provenance"] == {"theorem": "T3_5", "params": {"k": 1}}
    assert len(report["code_file"]["codewords"]) == 6


def test_construct_t42(capsys):
    code, out, _ = run(capsys, "construct", "--theorem", "T4_2")
    report = json.loads(out)
    assert code == EXIT_OK and report["code_size"] == 12 and report["label"] == "perfect(1)"


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--theorem", "N4_1", "--param", "n=13"],
        ["construct", "--theorem", "T9_9"],
        ["construct"],
        ["construct", "--theorem", "T3_5", "--param", "k"],
        ["construct", "--theorem", "T3_7", "--param", "i=1"],
        ["construct", "--theorem", "T3_5", "--k", "0"],
        ["frobnicate"],
        [],
    ],
)
def test_construct_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_INPUT


def test_construct_with_input_code(capsys, tmp_path):
    base = tmp_path / "c4c6.json"
    base.write_text(json.dumps({"graph": "C4xC6", "codewords": [[0, 0], [2, 3]]}))
    code, out, _ = run(
        capsys, "construct", "--theorem", "T3_7", "--code", base,
        "--param", "i=1", "--param", "add_row=true", "--param", "add_col=true",
    )
    report = json.loads(out)
    assert code == EXIT_OK and report["graph"] == "C5xC7" and report["label"] == "quasi_perfect(2)"
    code, _, _ = run(capsys, "construct", "--theorem", "T3_7", "--code", base, "--param", "i=4")
    assert code == EXIT_INPUT


def test_construct_refuted_claim_exits_1(capsys):
    # a construction whose claim the classifier refutes
    code, out, _ = run(capsys, "construct", "--theorem", "T4_4a", "--k", "2")
    assert code == EXIT_REFUTED
    assert json.loads(out)["verdict"] == "refuted"


def test_tile_alias_writes_canonical_file(capsys, tmp_path):
    dest = tmp_path / "tile.json"
    code, out, _ = run(capsys, "tile", "--param", "p=2", "--param", "q=2", "--out", dest)
    assert code == EXIT_OK
    assert json.loads(out)["label"] == "perfect(1)"
    text = dest.read_text()
    cf = loads_code_file(text)
    assert len(cf.codewords) == 24 and cf.graph == "C6xC12xC2"
    assert cf.claim == ("perfect", 1)
    assert cf.dumps() == text
    code, _, _ = run(capsys, "construct", "--theorem", "N3_4", "--param", "p=2", "--param", "q=2", "--out", tmp_path / "c.json")
    assert (tmp_path / "c.json").read_text() == text
    assert run(capsys, "classify", "--code", dest)[0] == EXIT_OK


# -- search ------------------------------------------------------------------------


def test_search_exit_codes(capsys):
    assert run(capsys, "search", "--graph", "C4xC4", "--kind", "perfect", "--e", "1", "--exhaustive")[0] == EXIT_REFUTED
    code, out, _ = run(capsys, "search", "--graph", "C3xC6xC2", "--kind", "perfect", "--e", "1")
    assert code == EXIT_OK
    report = json.loads(out)
    assert len(report["witness"]) == 6 and report["report"]["label"] == "perfect(1)"
    code, out, _ = run(capsys, "search", "--graph", "C3xC3xC3", "--kind", "quasi_perfect", "--e", "1", "--min-size")
    assert code == EXIT_OK and json.loads(out)["min_size"] == 3
    budget = ["search", "--graph", "C4xC4", "--kind", "perfect", "--e", "1", "--exhaustive", "--budget", "5"]
    assert run(capsys, *budget)[0] == EXIT_INCONCLUSIVE
    assert run(capsys, *budget, "--min-size")[0] == EXIT_INCONCLUSIVE
    assert run(capsys, "search", "--graph", "C4xC4", "--kind", "perfect", "--e", "1")[0] == EXIT_INCONCLUSIVE


@pytest.mark.parametrize(
    "extra",
    [
        ["--graph", "C10xC10", "--cap", "50"],
        ["--graph", "C4xC4", "--size-max", "99"],
        ["--graph", "C4x"],
        [],
    ],
)
def test_search_input_errors(capsys, extra):
    assert run(capsys, "search", "--kind", "perfect", "--e", "1", *extra)[0] == EXIT_INPUT


# -- files and rendering -----------------------------------------------------------


def test_code_file_round_trip_is_byte_identical():
    for path in GOLDEN.glob("*.json"):
        try:
            cf = loads_code_file(path.read_text())
        except CodeFileError:
            continue
        canonical = cf.dumps()
        assert loads_code_file(canonical).dumps() == canonical


def test_code_file_sorts_codewords():
    cf = CodeFile("P3xP3", [[2, 2], [0, 1]])
    assert cf.to_dict()["codewords"] == [[0, 1], [2, 2]]
    assert '"codewords": [\n    [0, 1],\n    [2, 2]\n  ]' in cf.dumps()


def test_code_file_rejects_bad_types():
    for text in ('[]', '{"graph": 3, "codewords": []}', '{"graph": "C3", "codewords": [[true]]}',
                 '{"graph": "C3", "codewords": [[0]], "claim": {"kind": "perfect", "e": -1}}'):
        with pytest.raises(CodeFileError):
            loads_code_file(text)


def test_report_verdict_iff_claim():
    code = Code("C6", [(0,), (3,)])
    rep = classify(code)
    assert "verdict" not in build_report(code, rep)
    assert build_report(code, rep, ("perfect", 1))["verdict"] == "holds"
    assert build_report(code, rep, ("quasi_perfect", 1))["verdict"] == "refuted"


def _counts(text):
    return text.count("#"), text.count("+")


def test_render_tile_code():
    code = Code("C3xC6xC2", [(0, 0, 0), (1, 2, 0), (2, 4, 0), (2, 1, 1), (0, 3, 1), (1, 5, 1)])
    text = render(code, 1)
    blocks = [b for b in text.split("\n\n") if b.strip()]
    assert len(blocks) == 2
    for z, block in enumerate(blocks):
        lines = block.splitlines()
        assert lines[0] == f"level {z}"
        assert [len(row) for row in lines[1:]] == [6, 6, 6]
    assert _counts(text) == (6, 0)


def test_render_t53_ring():
    code = build_t53(4, 4).code
    text = render(code, 3)
    blocks = [b for b in text.split("\n\n") if b.strip()]
    assert len(blocks) == 4
    assert all(len(b.splitlines()) == 5 for b in blocks)
    hist = classify(code).histogram
    assert _counts(text) == (2, hist[4])
    assert hist[4] > 0


def test_render_single_vertex():
    assert render(Code("C1", [(0,)]), 0) == "#\n"


def test_render_too_many_factors():
    with pytest.raises(GraphSpecError):
        render(Code("C2xC2xC2xC2", [(0, 0, 0, 0)]), 1)


@pytest.mark.parametrize(
    "spec, words, e",
    [
        ("C8xC8", [(i, 2 * i % 8) for i in range(8)], 1),
        ("P4xP4", [(0, 0), (3, 3)], 2),
        ("P5xC4xP3", [(0, 0, 0), (4, 2, 2), (2, 1, 1)], 1),
        ("C7", [(0,), (3,)], 0),
    ],
)
def test_render_glyph_counts_match_histogram(spec, words, e):
    code = Code(spec, words)
    hist = classify(code).histogram
    plus = hist[e + 1] if e + 1 < len(hist) else 0
    assert _counts(render(code, e)) == (len(code), plus)


def test_render_cli(capsys, tmp_path):
    code, out, _ = run(capsys, "render", "--code", GOLDEN / "tile_perfect1.json", "--e", "1")
    assert code == EXIT_OK and out.startswith("level 0\n")
    assert run(capsys, "render", "--code", GOLDEN / "tile_perfect1.json")[0] == EXIT_INPUT
    dest = tmp_path / "pic.txt"
    assert run(capsys, "render", "--code", GOLDEN / "tile_perfect1.json", "--e", "1", "--out", dest)[0] == EXIT_OK
    assert dest.read_text() == out


def test_failed_command_leaves_no_output_file(capsys, tmp_path):
    dest = tmp_path / "never.json"
    assert run(capsys, "construct", "--theorem", "N4_1", "--param", "n=13", "--out", dest)[0] == EXIT_INPUT
    assert not dest.exists()
    assert list(tmp_path.iterdir()) == []


def test_explicit_graph_through_cli(capsys, tmp_path):
    gpath = tmp_path / "claw.json"
    gpath.write_text(json.dumps({"n": 4, "edges": [[0, 1], [0, 2], [0, 3]]}))
    spec = f"@{gpath}xP2"
    cpath = tmp_path / "code.json"
    cpath.write_text(json.dumps({"graph": spec, "codewords": [[0, 0]]}))
    code, out, _ = run(capsys, "classify", "--code", cpath)
    assert code == EXIT_OK
    assert json.loads(out)["covering_radius"] == parse_graph_spec(spec).distance((0, 0), (1, 1))
