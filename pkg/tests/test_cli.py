import json

import pytest

from boolperc.cli import COMMANDS, HELP, main
from boolperc.db import SessionLocal, init_db
from boolperc.export import ESTIMATE_COLUMNS, csv_body, read_csv
from boolperc.models import ExperimentRun
from boolperc.sim.graphs import DEFAULT_BUDGET


@pytest.fixture(autouse=True)
def restore_budget(monkeypatch):
    # --budget writes PERC_BUDGET; monkeypatch removes it again afterwards
    monkeypatch.setenv("PERC_BUDGET", str(DEFAULT_BUDGET))


def test_every_command_has_help():
    assert set(COMMANDS) == set(HELP)


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "sweep" in capsys.readouterr().out


def test_missing_command_is_a_config_error():
    assert main([]) == 1


def test_unknown_flag():
    assert main(["bounds", "--colour", "blue"]) == 1


def test_bounds(capsys):
    assert main(["bounds", "--model", "z:1", "--law", "const:1", "--dim", "1", "--c1", "3", "--p", "0.01", "--r", "1,2"]) == 0
    out = capsys.readouterr().out
    assert "p0 = 1/8640000" in out
    assert "K = 7200, C2 = 30, C3 = 300" in out


def test_bounds_infinite_moment(capsys):
    assert main(["bounds", "--law", "zeta:1"]) == 0
    assert "p0 undefined" in capsys.readouterr().out


def test_sweep_is_deterministic(tmp_path):
    args = ["sweep", "--model", "z:1", "--law", "geom:0.5", "--p", "0.2,0.4", "--r", "1", "--replicas", "60", "--seed", "3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert csv_body(a) == csv_body(b)
    frame = read_csv(a)
    assert list(frame.columns) == ESTIMATE_COLUMNS
    assert frame["p"].tolist() == [0.2, 0.4]
    assert (frame["event_kind"] == "G").all()


def test_config_file(tmp_path, capsys):
    path = tmp_path / "sample.cfg"
    path.write_text("model = z:2\np = 1.0\nlaw = const:0\n")
    assert main(["sample", "--config", str(path), "--window", "2"]) == 0
    assert "13 vertices, 13 occupied" in capsys.readouterr().out


def test_json_output_and_plot(tmp_path):
    out = tmp_path / "growth.json"
    assert main(["graph-info", "--model", "z:2", "--r", "1,2,4", "--output", str(out), "--plot"]) == 0
    payload = json.loads(out.read_text())
    assert [row["ball"] for row in payload["results"]["rows"]] == [5, 13, 41]
    assert (tmp_path / "growth.svg").read_text().startswith("<svg")


def test_recursion(tmp_path):
    out = tmp_path / "rec.csv"
    assert main(["recursion", "--output", str(out)]) == 0
    frame = read_csv(out)
    assert len(frame) == 21
    assert frame["direct"].iloc[-1] < 1e-3
    assert frame["direct_exact"].iloc[0] == "1/2"


def test_oracle(capsys):
    assert main(["oracle", "--p", "0,1", "--law", "const:1"]) == 0
    out = capsys.readouterr().out
    assert "P(G(0,1)) at p=0: 0.0000000000" in out
    assert "P(G(0,1)) at p=1: 1.0000000000" in out


def test_net_and_cluster(capsys):
    assert main(["net", "--model", "z:1", "--r", "4", "--sep", "2"]) == 0
    assert "5 of 9 vertices" in capsys.readouterr().out
    assert main(["cluster", "--model", "z:1", "--p", "1", "--law", "const:1", "--window", "5"]) == 0
    assert "size 11" in capsys.readouterr().out


def test_diameter_inclusion(tmp_path, capsys):
    out_file = tmp_path / "inclusion.csv"
    args = ["diameter-inclusion", "--model", "z:1", "--law", "const:1", "--p", "0.3", "--r", "1",
            "--replicas", "20", "--output", str(out_file)]
    assert main(args) == 0
    assert "0 counterexamples over 20 configurations" in capsys.readouterr().out
    frame = read_csv(out_file)
    assert frame["L"].tolist() == [20]


def test_coverage(capsys):
    assert main(["coverage", "--model", "z:1", "--law", "zeta:1", "--p", "0.05", "--r", "0", "--windows", "50,200", "--terms", "200"]) == 0
    assert "diverges" in capsys.readouterr().out


def test_invalid_law_exits_one(capsys):
    assert main(["sample", "--law", "beta:2"]) == 1
    assert "error:" in capsys.readouterr().err


def test_unreadable_graph_file_exits_one(tmp_path, capsys):
    assert main(["graph-info", "--model", f"file:{tmp_path / 'missing.txt'}", "--r", "1"]) == 1
    assert "cannot read" in capsys.readouterr().err
    blob = tmp_path / "blob.txt"
    blob.write_bytes(b"\xff\xfe 1 2 1\n")
    assert main(["graph-info", "--model", f"file:{blob}", "--r", "1"]) == 1


def test_window_too_small_exits_two(capsys):
    assert main(["event-h", "--window", "5", "--replicas", "10"]) == 2
    assert "window" in capsys.readouterr().err


def test_budget_exceeded_exits_two():
    assert main(["graph-info", "--model", "z:3", "--r", "50", "--budget", "100"]) == 2


def test_record(capsys):
    init_db()
    assert main(["event-g", "--p", "0.3", "--replicas", "20", "--record"]) == 0
    assert "recorded run" in capsys.readouterr().out
    db = SessionLocal()
    try:
        run = db.query(ExperimentRun).filter(ExperimentRun.subcommand == "event-g").order_by(ExperimentRun.id.desc()).first()
        assert run is not None
        assert run.config["replicas"] == 20
        assert len(run.estimates) == 1
        assert run.estimates[0].event_kind == "G"
    finally:
        db.close()
