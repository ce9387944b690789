import json
import subprocess
import sys

import pytest

from ucurve import cli
from ucurve.cost import TrapCost, synth_u_instance


def run(*argv):
    out = []
    code = cli.main(list(argv), stdout=out.append)
    return code, "".join(out)


def jsonl(text):
    return [json.loads(line) for line in text.splitlines()]


def test_exhaustive_small_synthetic():
    code, text = run("run", "--algo", "exhaustive", "--cost", "synth", "--n", "4", "--seed", "7", "--out", "json-lines")
    assert code == 0
    (report,) = jsonl(text)
    assert report["computed_nodes"] == 16 and report["algorithm"] == "exhaustive"
    assert set(report) == set(cli.RunReport.FIELDS)


def test_repeats_add_a_mean_row():
    code, text = run("run", "--cost", "synth", "--n", "8", "--seed", "3", "--repeats", "3", "--out", "json-lines")
    rows = jsonl(text)
    assert code == 0 and len(rows) == 4
    assert [r["seed"] for r in rows] == [3, 4, 5, "mean"]
    assert rows[-1]["computed_nodes"] == pytest.approx(sum(r["computed_nodes"] for r in rows[:3]) / 3)


def test_votes_ucc_repeats_agree_and_beat_sffs():
    common = ("--cost", "pmce", "--data", "bundled:votes16.csv", "--preprocess", "binarize", "--out", "json-lines")
    code, text = run("run", "--algo", "ucurve", "--mode", "ucc", "--repeats", "5", *common)
    assert code == 0
    rows = jsonl(text)
    assert len(rows) == 6
    costs = {r["best_cost"] for r in rows}
    assert len(costs) == 1
    _, ex = run("run", "--algo", "exhaustive", *common)
    assert jsonl(ex)[0]["best_cost"] == costs.pop()
    _, sf = run("run", "--algo", "sffs", "--delta", "3", *common)
    assert jsonl(sf)[0]["best_cost"] >= rows[0]["best_cost"]


def test_csv_and_markdown_outputs():
    _, text = run("run", "--cost", "trap", "--out", "csv")
    assert text.splitlines()[0] == ",".join(cli.RunReport.FIELDS)
    _, text = run("run", "--cost", "trap", "--out", "md")
    assert text.startswith("| algorithm |")


def test_uc_mode_defaults_to_the_sffs_target():
    code, text = run("run", "--cost", "trap", "--mode", "uc", "--out", "json-lines")
    (row,) = jsonl(text)
    assert row["algorithm"] == "ucurve_uc"
    assert row["config"]["stop_below"] == pytest.approx(-0.9)
    assert row["best_cost"] == -1.0 and row["config"]["stop_reason"] == "target"


def test_json_lines_are_deterministic():
    argv = ("run", "--cost", "synth", "--n", "9", "--seed", "2", "--repeats", "2", "--direction", "adaptive", "--out", "json-lines")
    outs = []
    for _ in range(2):
        rows = jsonl(run(*argv)[1])
        for r in rows:
            r.pop("wall_time_seconds")
        outs.append(rows)
    assert outs[0] == outs[1]


def test_trace_file(tmp_path):
    trace = tmp_path / "t.tsv"
    code, _ = run("run", "--cost", "synth", "--n", "6", "--repeats", "2", "--trace", str(trace))
    lines = trace.read_text().splitlines()
    assert code == 0 and lines
    assert {line.split("\t")[0] for line in lines} == {"0", "1"}
    assert all(len(line.split("\t")) == 5 for line in lines)


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\ncost = synth\nn = 5\nseed = 4\nout = json-lines\n")
    (row,) = jsonl(run("run", "--config", str(cfg))[1])
    assert row["seed"] == 4 and row["config"]["n"] == 5
    (row,) = jsonl(run("run", "--config", str(cfg), "--seed", "9")[1])
    assert row["seed"] == 9
    cfg.write_text("colour = blue\n")
    assert run("run", "--config", str(cfg))[0] == cli.EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [
        ("run", "--algo", "sffs", "--mode", "uc", "--cost", "trap"),
        ("run", "--cost", "synth"),
        ("run", "--cost", "pmce"),
        ("run", "--cost", "trap", "--direction", "sideways"),
        ("run", "--cost", "trap", "--repeats", "0"),
        ("run", "--algo", "nope"),
        ("compare",),
    ],
)
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        code, _ = run(*argv)
        raise SystemExit(code)
    assert exc.value.code == cli.EXIT_USAGE


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2,a\n1,b\n")
    assert run("run", "--data", str(bad))[0] == cli.EXIT_DATA
    assert run("run", "--data", str(tmp_path / "missing.csv"))[0] == cli.EXIT_DATA
    cont = tmp_path / "cont.csv"
    cont.write_text("0.5,a\n1.5,b\n")
    assert run("run", "--data", str(cont))[0] == cli.EXIT_DATA


def test_exhaustive_guard_needs_force():
    assert run("run", "--algo", "exhaustive", "--data", "bundled:ionosphere34.csv", "--preprocess", "binarize")[0] == cli.EXIT_USAGE


# -- compare -----------------------------------------------------------------


def test_compare_trap_is_a_uc_win():
    row = cli.compare_problem(TrapCost(), "trap", repeats=2)
    assert row.winner == "UC"
    assert min(row.uc_costs) == -1.0 and row.sffs_cost == pytest.approx(-0.9)
    assert min(row.ucc_costs) == -1.0


def test_compare_size_only_instance_is_equal():
    cost = synth_u_instance(8, 1, plateaus=True)
    row = cli.compare_problem(cost, "flat", repeats=2)
    assert row.winner == "EQUAL"


def test_compare_without_ucc_shows_na():
    code, text = run("compare", "--cost", "trap", "--mode", "uc", "--repeats", "1")
    assert code == 0
    header, rule, body = text.splitlines()
    assert header == "| " + " | ".join(cli.TABLE_HEADER) + " |"
    cells = [c.strip() for c in body.strip("|").split("|")]
    assert cells[4] == "NA" and cells[7] == "NA"


def test_compare_output_formats():
    _, text = run("compare", "--cost", "trap", "--repeats", "1", "--out", "csv", "--costs")
    head = text.splitlines()[0].split(",")
    assert head[:8] == list(cli.TABLE_HEADER) and head[8:] == ["SFFS cost", "UC cost", "UCC cost"]
    _, text = run("compare", "--cost", "trap", "--repeats", "1", "--out", "json-lines")
    assert jsonl(text)[0]["Winner"] == "UC"


# -- selftest ----------------------------------------------------------------


def test_selftest_small():
    code, text = run("selftest", "--n", "4", "--trials", "10")
    assert code == 0
    assert "10/10 oracle matches" in text


def test_selftest_reports_a_mutated_stop_rule(monkeypatch):
    from ucurve import search

    monkeypatch.setattr(search, "u_curve_condition", lambda nxt, cur: nxt >= cur)
    code, text = run("selftest", "--n", "12", "--trials", "100")
    assert code == cli.EXIT_SELFTEST
    assert "COUNTEREXAMPLE" in text and "seed=" in text and "restrictions" in text


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ucurve", "run", "--cost", "synth", "--n", "4", "--algo", "exhaustive", "--out", "csv"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("algorithm,")
    proc = subprocess.run([sys.executable, "-m", "ucurve", "run", "--bogus"], capture_output=True, text=True)
    assert proc.returncode == cli.EXIT_USAGE
