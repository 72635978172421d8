import json
import subprocess
import sys

import pytest

from tempoflow.cli import main

from instances import DATA


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return status, (json.loads(out) if out else None)


def test_maxflow(capsys):
    status, doc = run(capsys, "maxflow", DATA / "crossover.json", "--horizon", "4")
    assert status == 0
    assert doc["value"] == "1"
    assert doc["certificate"]["capacity"] == "1"


def test_lexmax(capsys):
    status, doc = run(
        capsys, "lexmax", DATA / "crossover_unit.json", "--horizon", "4", "--order", "s1,t1,s2,t2"
    )
    assert status == 0
    assert doc["nets"] == {"s1": "2", "t1": "-1", "s2": "1", "t2": "-2"}
    assert doc["chains"][0] == {"value": "1", "nodes": ["ψ", "s2", "w", "t2", "ψ"], "startTime": "0"}
    assert {"subset": ["s1", "t1"], "o": "1"} in doc["prefix_values"]


def test_earliest_infinite(capsys):
    status, doc = run(capsys, "earliest", DATA / "crossover.json", "--horizon", "inf")
    assert status == 0
    assert doc["arrival_pattern"][-1]["slope"] == "2"
    assert doc["schedule"]["horizon"] == "inf"


def test_feasible_and_transship(capsys, tmp_path):
    status, doc = run(capsys, "feasible", DATA / "crossover_unit.json", "--horizon", "4")
    assert status == 0 and doc["feasible"] is True
    status, doc = run(
        capsys, "transship", DATA / "crossover_unit.json", "--horizon", "4", "--supplies", "s1=3,t2=-3"
    )
    assert status == 3
    assert doc == {"feasible": False, "violating_set": ["s1", "t1"], "gap": "2"}


def test_quickest(capsys):
    status, doc = run(capsys, "quickest", DATA / "single_arc.json", "--precision", "1/8")
    assert status == 0 and doc["horizon"] == "3"


def test_oracle(capsys):
    status, doc = run(capsys, "oracle", DATA / "crossover.json", "--horizon", "6")
    assert {"subset": ["s1", "s2"], "o": "4"} in doc["o_values"]


def test_verify_rejects_backward_schedule(capsys):
    status, doc = run(
        capsys, "verify", DATA / "crossover_unit.json", DATA / "crossover_unit_backward_schedule.json"
    )
    assert status == 1
    assert {"kind": "capacity", "where": "v->w", "from": "0", "to": "1", "value": "-1"} in doc["violations"]


@pytest.mark.parametrize(
    "command, args",
    [
        ("maxflow", ["--horizon", "6"]),
        ("earliest", ["--horizon", "6"]),
        ("lexmax", ["--horizon", "4", "--order", "s2,t1,s1,t2"]),
        ("transship", ["--horizon", "4"]),
        ("quickest", []),
    ],
)
def test_emitted_schedules_verify(capsys, tmp_path, command, args):
    net = DATA / ("crossover.json" if command in ("maxflow", "earliest") else "crossover_unit.json")
    out = tmp_path / "result.json"
    status, _ = run(capsys, command, net, *args, "--output", out)
    assert status == 0
    schedule = tmp_path / "schedule.json"
    schedule.write_text(json.dumps(json.loads(out.read_text())["schedule"]))
    status, doc = run(capsys, "verify", net, schedule)
    assert status == 0 and doc["ok"]


def test_output_is_deterministic(capsys):
    argv = ["lexmax", DATA / "crossover_unit.json", "--horizon", "4"]
    main([str(a) for a in argv])
    first = capsys.readouterr().out
    main([str(a) for a in argv])
    assert capsys.readouterr().out == first


@pytest.mark.parametrize(
    "argv",
    [
        ["maxflow", "missing.json", "--horizon", "4"],
        ["maxflow", str(DATA / "crossover.json"), "--horizon", "0.5"],
        ["lexmax", str(DATA / "crossover.json"), "--horizon", "4", "--order", "s1,t1"],
    ],
)
def test_bad_input_exit_code(capsys, argv):
    assert main(argv) == 2


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": [}')
    assert main(["maxflow", str(bad), "--horizon", "1"]) == 2
    assert "line 1" in capsys.readouterr().err


def test_iteration_cap_exit_code(capsys):
    assert main(["earliest", str(DATA / "crossover.json"), "--horizon", "6", "--max-iterations", "1"]) == 4


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tempoflow", "maxflow", str(DATA / "crossover.json"), "--horizon", "6"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == "4"
