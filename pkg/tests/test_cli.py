from __future__ import annotations

import json

import pytest

from treeforcing.cli import main
from treeforcing.codec import decode_condition, encode_condition
from treeforcing.forcing import Condition
from treeforcing.ordinals import parse_ordinal
from treeforcing.separation import RhoOracle

from test_forcing_ops import t1_condition

O = parse_ordinal


@pytest.fixture
def t1_file(tmp_path):
    path = tmp_path / "t1.json"
    path.write_text(encode_condition(t1_condition()))
    return str(path)


def test_validate_ok(t1_file, capsys):
    assert main(["validate", t1_file]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_invalid_exits_1(tmp_path, capsys):
    p = t1_condition()
    doc = json.loads(encode_condition(p))
    doc["maps"]["5"] = [["0", "0"], ["w", "w"]]  # fixed point off the root
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == 1
    assert "clause 2" in capsys.readouterr().out


def test_malformed_file_exits_2(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{")
    assert main(["validate", str(path)]) == 2
    assert "error" in capsys.readouterr().err


def test_leq_and_extend(t1_file, tmp_path, capsys):
    out = tmp_path / "ext.json"
    assert main(["--out", str(out), "extend", t1_file, "--heights", "3,w"]) == 0
    assert main(["leq", str(out), t1_file]) == 0
    assert main(["leq", t1_file, str(out)]) == 1


def test_check_sep(t1_file, capsys):
    assert main(["check-sep", t1_file, "--level", "1"]) == 0
    assert "witness-order" in capsys.readouterr().out


def test_check_sep_violation(tmp_path, capsys):
    p = t1_condition()
    fam = dict(p.family)
    from treeforcing.treemaps import TreeMap
    from treeforcing.ordinals import ZERO

    fam[9] = TreeMap([(ZERO, ZERO), (O("w"), O("w+1"))])
    rho = RhoOracle.from_entries([(5, 9, O("1"))])
    path = tmp_path / "two.json"
    path.write_text(encode_condition(Condition(p.tree, fam), rho))
    # with the file's oracle the level is rho-separated
    assert main(["check-sep", str(path), "--level", "1"]) == 0
    # plain separation rejects the double relation
    assert main(["check-sep", str(path), "--level", "1", "--plain"]) == 1
    assert "pairwise-violation" in capsys.readouterr().out


def test_widen_grow_augment_pipeline(t1_file, tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    c = tmp_path / "c.json"
    assert main(["--out", str(a), "widen", t1_file, "--node", "w", "--count", "3"]) == 0
    assert main(["--out", str(b), "add-index", str(a), "--index", "9"]) == 0
    assert main(["--out", str(c), "augment", str(b), "--index", "9", "--node", "w"]) == 0
    q, _ = decode_condition(c.read_text())
    assert O("w") in q.family[9].domain
    assert main(["leq", str(c), t1_file]) == 0


def test_gen_validate_round(tmp_path):
    out = tmp_path / "gen.json"
    assert main(["--seed", "11", "--out", str(out), "gen"]) == 0
    assert main(["validate", str(out)]) == 0
    again = tmp_path / "gen2.json"
    assert main(["--seed", "11", "--out", str(again), "gen"]) == 0
    assert out.read_text() == again.read_text()


def test_export_dot(t1_file, capsys):
    assert main(["export-dot", t1_file]) == 0
    assert "digraph" in capsys.readouterr().out


def test_match_pair_amalgamate_pipeline(tmp_path, capsys):
    from test_amalgamation import base_condition

    src = tmp_path / "p.json"
    src.write_text(encode_condition(base_condition(with_edge=True)))
    mp_file = tmp_path / "mp.json"
    out = tmp_path / "w.json"
    assert (
        main(
            [
                "--out",
                str(mp_file),
                "match-pair",
                str(src),
                "--alpha",
                "w^w",
                "--beta",
                "w^w*2",
                "--node",
                "w^w",
            ]
        )
        == 0
    )
    assert main(["--out", str(out), "amalgamate", str(mp_file)]) == 0
    assert main(["validate", str(out)]) == 0
    assert main(["leq", str(out), str(src)]) == 0


def test_one_key_cli(tmp_path, capsys):
    from test_bijectivize import chain_three
    from treeforcing.forcing import extend_heights, normalize_condition
    from treeforcing.ordinals import node_at, node_height

    rho = RhoOracle.zero()
    p = chain_three()
    p = extend_heights(p, {O("3")}, rho)
    p = normalize_condition(p, rho)
    b = min(
        y for y in p.tree.successors(node_at(O("1"), 1)) if node_height(y) == O("3")
    )
    src = tmp_path / "p.json"
    src.write_text(encode_condition(p))
    out = tmp_path / "lifted.json"
    nodes = ",".join(str(node_at(O("1"), k)) for k in range(3))
    assert (
        main(
            [
                "--out",
                str(out),
                "one-key",
                str(src),
                "--level",
                "1",
                "--nodes",
                nodes,
                "--indices",
                "3,8",
                "--node",
                str(b),
            ]
        )
        == 0
    )
    assert "support:" in capsys.readouterr().out
    assert main(["leq", str(out), str(src)]) == 0


def test_run_scenario_cli(tmp_path, capsys):
    scn = tmp_path / "s.json"
    scn.write_text(
        json.dumps(
            {
                "steps": [
                    {"op": "add_index", "args": {"index": 5}},
                    {"op": "augment", "args": {"index": 5, "node": "0"}},
                ]
            }
        )
    )
    assert main(["run", str(scn)]) == 0
    out = capsys.readouterr().out
    assert "step 0 add_index: ok" in out
    assert "containment" in out
