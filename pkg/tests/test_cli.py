from __future__ import annotations

import json

from tcreol.cli import main


def report(out: str) -> dict[str, str]:
    rows = {}
    for line in out.splitlines():
        key, sep, val = line.partition(":")
        if sep:
            rows[key.strip()] = val.strip()
    return rows


def test_run_star_resend(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    assert main(["run", "star-resend", "--seed", "1", "--limit", "200", "--trace", str(trace)]) == 0
    rep = report(capsys.readouterr().out)
    assert rep["final clock"] == "200" and rep["sink"] == "received=12,last=12"
    assert rep["exit"] == "0" and rep["trace"] == str(trace)
    assert trace.read_text().count("\n") == int(rep["steps"])


def test_run_defaults_printed(capsys):
    assert main(["run", "ping"]) == 0
    rep = report(capsys.readouterr().out)
    assert rep["seed"] == "0" and rep["limit"] == "1000"
    assert rep["policy"].startswith("seeded-random")


def test_run_syntax_error(capsys, tmp_path):
    bad = tmp_path / "bad.tcreol"
    bad.write_text("class Main begin\n op run == x := end\n")
    assert main(["run", str(bad)]) == 1
    assert "bad.tcreol:2:" in capsys.readouterr().err


def test_run_missing_file(capsys):
    assert main(["run", "/nonexistent/model.tcreol"]) == 1


def test_run_truncated(capsys):
    assert main(["run", "ping", "--max-steps", "2"]) == 3
    assert report(capsys.readouterr().out)["status"].startswith("truncated")


def test_run_fault(capsys, tmp_path):
    m = tmp_path / "div.tcreol"
    m.write_text("class Main begin var x: Int; op run == x := 1 / x end\n")
    assert main(["run", str(m), "--limit", "1"]) == 2
    captured = capsys.readouterr()
    assert report(captured.out)["exit"] == "2"


def test_trace_files_byte_identical(tmp_path):
    paths = [tmp_path / f"t{i}.jsonl" for i in range(2)]
    for p in paths:
        assert main(["run", "mixed-drop", "--seed", "7", "--limit", "200", "--trace", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_explore_query_found(capsys, tmp_path):
    w = tmp_path / "w.jsonl"
    assert main(["explore", "star-drop", "--limit", "200", "--query", "received=2,last=2",
                 "--witness", str(w)]) == 0
    assert "witness" in capsys.readouterr().out
    assert w.exists() and w.read_text()


def test_explore_depth_one_truncated(capsys):
    assert main(["explore", "ping", "--limit", "3", "--depth", "1"]) == 0
    assert "truncated: true" in capsys.readouterr().out


def test_explore_exhaustive(capsys):
    assert main(["explore", "ping", "--limit", "3"]) == 0
    out = capsys.readouterr().out
    assert "truncated: false" in out and "terminal states: 1" in out


def test_explore_not_found(capsys):
    code = main(["explore", "star-no-interference", "--limit", "200", "--query", "received=99",
                 "--samples", "2", "--states", "200"])
    assert code == 4
    assert "not found within bounds" in capsys.readouterr().out


def test_explore_malformed_query(capsys):
    assert main(["explore", "star-drop", "--query", "received"]) == 1


def test_bench_table1_star(capsys, tmp_path):
    js = tmp_path / "t1.json"
    assert main(["bench-table1", "--topologies", "star", "--json", str(js)]) == 0
    out = capsys.readouterr().out
    assert len([ln for ln in out.splitlines() if " star " in ln and " yes " in ln]) == 3
    rows = json.loads(js.read_text())
    rows = rows["rows"] if isinstance(rows, dict) else rows
    assert len(rows) == 3 and all(r["achievable"] for r in rows)


def test_bench_table1_distributions(capsys):
    assert main(["bench-table1", "--topologies", "star", "--variants", "resend", "--seeds", "3"]) == 0
    assert "resend/star over 3 seeds" in capsys.readouterr().out


def test_parse_and_models(capsys):
    assert main(["parse", "ping", "--dump-ast"]) == 0
    assert json.loads(capsys.readouterr().out)["node"] == "Program"
    assert main(["parse", "timeout-5", "--desugar"]) == 0
    assert "class Main" in capsys.readouterr().out
    assert main(["models"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 14
