import json
from importlib import resources

import pytest

from clausegraph.cli import dispatch
from clausegraph.formats import (
    dump_graphs,
    dump_params,
    grammar_to_obj,
    load_grammar,
    load_graphs,
)
from clausegraph.grammars import path_grammar, triangle_grammar, twin_grammar
from clausegraph.graphs import closed, graph_from_parts


def data_path(name: str) -> str:
    return str(resources.files("clausegraph").joinpath(f"data/{name}"))


@pytest.fixture()
def path_files(tmp_path):
    graph = closed(graph_from_parts([(0, "a"), (1, "a"), (2, "a")],
                                    [(0, 1, "e"), (1, 2, "e")]))
    gpath = tmp_path / "graph.json"
    dump_graphs([graph], gpath)
    return {
        "grammar": data_path("path_grammar.json"),
        "params": data_path("path_params.json"),
        "graph": str(gpath),
    }


def test_bundled_data_files_match_builders():
    for name, builder in (("path", path_grammar), ("triangle", triangle_grammar),
                          ("twin", twin_grammar)):
        gamma, params = builder()
        loaded = load_grammar(data_path(f"{name}_grammar.json"))
        assert loaded.digest_key() == gamma.digest_key()


def test_member_yes(capsys, path_files):
    code = dispatch(["member", "--grammar", path_files["grammar"],
                     "--graph", path_files["graph"],
                     "--params", path_files["params"]])
    out = capsys.readouterr().out
    assert code == 0
    assert out.strip() == "YES"


def test_member_no_is_exit_zero(capsys, tmp_path, path_files):
    tri = closed(graph_from_parts([(0, "a"), (1, "a"), (2, "a")],
                                  [(0, 1, "e"), (1, 2, "e"), (0, 2, "e")]))
    gpath = tmp_path / "tri.json"
    dump_graphs([tri], gpath)
    code = dispatch(["member", "--grammar", path_files["grammar"],
                     "--graph", str(gpath), "--params", path_files["params"]])
    out = capsys.readouterr().out
    assert code == 0
    assert out.strip() == "NO"


def test_member_tree_output(capsys, path_files):
    code = dispatch(["member", "--grammar", path_files["grammar"],
                     "--graph", path_files["graph"],
                     "--params", path_files["params"], "--tree"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("YES")
    assert "via clause" in out


def test_oracle_alias(capsys, path_files):
    code = dispatch(["oracle", "--grammar", path_files["grammar"],
                     "--graph", path_files["graph"],
                     "--params", path_files["params"]])
    assert code == 0
    assert capsys.readouterr().out.strip() == "YES"


def test_missing_flag_is_usage_error(capsys):
    assert dispatch(["member", "--graph", "x.json"]) == 2


def test_unknown_command_is_usage_error(capsys):
    assert dispatch(["frobnicate"]) == 2


def test_unreadable_file_is_domain_error(capsys, path_files):
    code = dispatch(["member", "--grammar", "/nonexistent.json",
                     "--graph", path_files["graph"],
                     "--params", path_files["params"]])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_grammar_is_domain_error(capsys, tmp_path, path_files):
    obj = grammar_to_obj(load_grammar(path_files["grammar"]))
    obj["clauses"][1]["body"] = []
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(obj))
    code = dispatch(["member", "--grammar", str(bad),
                     "--graph", path_files["graph"],
                     "--params", path_files["params"]])
    err = capsys.readouterr().err
    assert code == 1
    assert "clause" in err


def test_brep_output(capsys, tmp_path):
    edge = closed(graph_from_parts([(0, "a"), (1, "a")], [(0, 1, "e")]))
    spath = tmp_path / "sample.json"
    dump_graphs([edge], spath)
    code = dispatch(["brep", "--sample", str(spath), "--w", "1", "--delta", "2"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("graph=0") == 5
    assert "rank 0: 1 representations" in out
    assert "rank 1: 4 representations" in out


def test_check_reports_violations_and_safety(capsys, tmp_path, path_files):
    code = dispatch(["check", "--grammar", path_files["grammar"],
                     "--params", path_files["params"]])
    out = capsys.readouterr().out
    assert code == 0
    assert "bounded: yes" in out
    assert "degree-safe: no" in out
    tight = tmp_path / "tight.json"
    from clausegraph.clauses import ParamTuple
    dump_params(ParamTuple(m=0, s=1, t=1, w=2, d=2, delta=2, h_max=3), tight)
    code = dispatch(["check", "--grammar", path_files["grammar"],
                     "--params", str(tight)])
    out = capsys.readouterr().out
    assert code == 0
    assert "violation:" in out and "bounded: no" in out


def test_generate_writes_members(capsys, tmp_path, path_files):
    out_dir = tmp_path / "members"
    code = dispatch(["generate", "--grammar", path_files["grammar"],
                     "--params", path_files["params"],
                     "--cap", "4", "--out", str(out_dir)])
    assert code == 0
    files = sorted(out_dir.glob("member_*.json"))
    assert len(files) == 3
    sizes = sorted(load_graphs(f)[0].graph.n for f in files)
    assert sizes == [2, 3, 4]


def test_learn_and_replay(capsys, tmp_path):
    out_dir = tmp_path / "run"
    argv = ["learn", "--target", data_path("triangle_grammar.json"),
            "--params", data_path("triangle_params.json"),
            "--cap", "4", "--stages", "3", "--out", str(out_dir)]
    assert dispatch(argv) == 0
    capsys.readouterr()
    trace = json.loads((out_dir / "trace.json").read_text())
    assert len(trace["stages"]) == 3
    assert trace["convergence"]["stable_from"] is not None
    assert (out_dir / "stage_001.json").exists()
    # identical rerun produces byte-identical outputs
    out2 = tmp_path / "run2"
    argv2 = argv[:-1] + [str(out2)]
    assert dispatch(argv2) == 0
    capsys.readouterr()
    t1 = (out_dir / "trace.json").read_text().replace(str(out_dir), "OUT")
    t2 = (out2 / "trace.json").read_text().replace(str(out2), "OUT")
    assert t1 == t2
    assert (out_dir / "stage_003.json").read_bytes() == \
        (out2 / "stage_003.json").read_bytes()
    # replay verifies the recorded trace
    assert dispatch(["learn", "--replay", str(out_dir / "trace.json")]) == 0
    assert "replay OK" in capsys.readouterr().out


def test_learn_replay_detects_tampering(capsys, tmp_path):
    out_dir = tmp_path / "run"
    dispatch(["learn", "--target", data_path("triangle_grammar.json"),
              "--params", data_path("triangle_params.json"),
              "--cap", "4", "--stages", "2", "--out", str(out_dir)])
    capsys.readouterr()
    trace_file = out_dir / "trace.json"
    trace = json.loads(trace_file.read_text())
    trace["stages"][0]["hypothesis_digest"] = "0" * 16
    trace_file.write_text(json.dumps(trace))
    assert dispatch(["learn", "--replay", str(trace_file)]) == 1
    assert "mismatch" in capsys.readouterr().out


def test_learn_config_file_with_flag_override(capsys, tmp_path):
    out_dir = tmp_path / "run"
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({
        "target": data_path("triangle_grammar.json"),
        "params": data_path("triangle_params.json"),
        "size_cap": 4, "stages": 5, "check_cap": 4,
        "out": str(tmp_path / "ignored")}))
    code = dispatch(["learn", "--config", str(cfg), "--stages", "2",
                     "--out", str(out_dir)])
    capsys.readouterr()
    assert code == 0
    trace = json.loads((out_dir / "trace.json").read_text())
    assert len(trace["stages"]) == 2


def test_learn_config_check_cap_bound(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({
        "target": data_path("triangle_grammar.json"),
        "params": data_path("triangle_params.json"),
        "size_cap": 4, "stages": 1, "check_cap": 9,
        "out": str(tmp_path / "o")}))
    assert dispatch(["learn", "--config", str(cfg)]) == 1
    assert "check_cap" in capsys.readouterr().err


def test_out_dir_env_override(capsys, tmp_path, monkeypatch):
    target = tmp_path / "env_out"
    monkeypatch.setenv("CLAUSEGRAPH_OUT", str(target))
    code = dispatch(["generate", "--grammar", data_path("triangle_grammar.json"),
                     "--params", data_path("triangle_params.json"),
                     "--cap", "3", "--out", str(tmp_path / "flag_out")])
    assert code == 0
    assert list(target.glob("member_*.json"))
