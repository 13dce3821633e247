import csv
import json

import pytest

from mdsp import cli
from mdsp.bench import CSV_HEADER, bound_threshold, evaluate, load_sweep, run_bench
from mdsp.generate import GenParams, generate
from mdsp.model import Instance, Job, SolveReport, audit_family, load_instance, save_instance, validate_instance


@pytest.fixture
def small(tmp_path):
    path = tmp_path / "inst.json"
    save_instance(generate(GenParams(n=8, m=2, budget=4, horizon=10, seed=11)), path)
    return path


@pytest.fixture
def unit_file(tmp_path):
    path = tmp_path / "unit.json"
    save_instance(generate(GenParams(n=7, m=2, budget=2, horizon=8, unit_cost=True, seed=2)), path)
    return path


def write_sweep(tmp_path, sets, algorithms=None, base_seed=5):
    data = {"base_seed": base_seed, "sets": sets}
    if algorithms:
        data["algorithms"] = algorithms
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(data))
    return path


def test_generate_to_file(tmp_path):
    out = tmp_path / "g.json"
    rc = cli.main(["generate", "--n", "6", "--m", "2", "--budget", "3", "--horizon", "10",
                   "--dur", "1:3", "--cost", "1:2", "--profit", "1:5", "--seed", "4", "--out", str(out)])
    assert rc == 0
    inst = load_instance(out)
    assert inst.n == 6 and inst.m == 2
    again = tmp_path / "g2.json"
    cli.main(["generate", "--n", "6", "--m", "2", "--budget", "3", "--horizon", "10",
              "--dur", "1:3", "--cost", "1:2", "--profit", "1:5", "--seed", "4", "--out", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_generate_unit_and_delta(tmp_path, capsys):
    rc = cli.main(["generate", "--n", "5", "--m", "2", "--budget", "2", "--horizon", "12",
                   "--unit-cost", "--require-delta-le-m", "--seed", "1"])
    assert rc == 0
    assert all(j["cost"] == 1.0 for j in json.loads(capsys.readouterr().out)["jobs"])


def test_generate_infeasible_exit(tmp_path):
    rc = cli.main(["generate", "--n", "10", "--m", "1", "--budget", "2", "--horizon", "4",
                   "--dur", "3:4", "--require-delta-le-m", "--max-retries", "5"])
    assert rc == cli.EXIT_GENERATION


@pytest.mark.parametrize("alg", ["greedy14", "greedy13", "oracle", "mr-s", "mr-m"])
def test_solve_report_round_trip(tmp_path, small, alg):
    out = tmp_path / "rep.json"
    assert cli.main(["solve", str(small), "--algorithm", alg, "--out", str(out)]) == 0
    rep = SolveReport.from_dict(json.loads(out.read_text()))
    assert rep.feasible and rep.algorithm == alg
    inst, _ = validate_instance(load_instance(small))
    assert rep.instance_ref == inst.fingerprint()
    assert audit_family(rep.family, inst)[0]


def test_solve_trace_and_ilp(tmp_path, small):
    trace, lp = tmp_path / "t.json", tmp_path / "m.lp"
    rc = cli.main(["solve", str(small), "-a", "greedy13", "--out", str(tmp_path / "r.json"),
                   "--trace", str(trace), "--export-ilp", str(lp)])
    assert rc == 0
    t = json.loads(trace.read_text())
    assert {"events", "critical_set", "corrections"} <= set(t)
    assert lp.read_text().startswith("\\ MDSP") and "\r" not in lp.read_text()


def test_solve_dp_unit(tmp_path, unit_file):
    out = tmp_path / "r.json"
    assert cli.main(["solve", str(unit_file), "-a", "dp-unit", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["params"]["states"] > 0


def test_exit_codes(tmp_path, small):
    assert cli.main(["solve", str(small), "-a", "dp-unit"]) == cli.EXIT_VARIANT
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert cli.main(["solve", str(bad)]) == cli.EXIT_PARSE
    bad.write_text('{"m": 1, "budget": 1, "jobs": [{"id": 1, "start": 2, "end": 1, "cost": 1, "profit": 1}]}')
    assert cli.main(["solve", str(bad)]) == cli.EXIT_PARSE
    assert cli.main(["solve", str(tmp_path / "missing.json")]) == cli.EXIT_PARSE
    big = tmp_path / "big.json"
    save_instance(generate(GenParams(n=20, m=2, budget=4, horizon=30, seed=1)), big)
    assert cli.main(["solve", str(big), "-a", "oracle"]) == cli.EXIT_RESOURCE
    with pytest.raises(SystemExit) as exc:
        cli.main(["solve", str(small), "-a", "nonsense"])
    assert exc.value.code == cli.EXIT_USAGE


def test_export_ilp_stdout(small, capsys):
    assert cli.main(["export-ilp", str(small)]) == 0
    assert capsys.readouterr().out.rstrip().endswith("End")


def test_compare(tmp_path, unit_file, capsys):
    out = tmp_path / "c.csv"
    assert cli.main(["compare", str(unit_file), "--csv", str(out)]) == 0
    text = capsys.readouterr().out
    assert "greedy13" in text and "dp-unit" in text
    rows = list(csv.DictReader(out.open()))
    by = {r["alg"]: r for r in rows}
    assert float(by["dp-unit"]["profit"]) == float(by["oracle"]["profit"])
    assert all(float(r["profit"]) <= float(by["oracle"]["profit"]) for r in rows)


def test_compare_oracle_cap_warning(tmp_path, capsys):
    big = tmp_path / "big.json"
    save_instance(generate(GenParams(n=20, m=2, budget=4, horizon=30, seed=1)), big)
    out = tmp_path / "c.csv"
    assert cli.main(["compare", str(big), "--algorithms", "greedy13,oracle", "--csv", str(out)]) == 0
    assert "oracle skipped" in capsys.readouterr().err
    rows = list(csv.DictReader(out.open()))
    assert [r["alg"] for r in rows] == ["greedy13"] and rows[0]["opt"] == ""


def test_compare_empty(tmp_path):
    path = tmp_path / "e.json"
    save_instance(Instance((), 2, 1.0), path)
    res = evaluate(load_instance(path), ["greedy14", "greedy13", "mr-s", "mr-m", "oracle", "dp-unit"])
    assert {r.alg for r in res.rows} == {"greedy14", "greedy13", "mr-s", "mr-m", "oracle", "dp-unit"}
    assert all(r.profit == 0 for r in res.rows)


def test_bound_threshold():
    from fractions import Fraction
    assert bound_threshold("greedy14", 2, 2) == Fraction(1, 4)
    assert bound_threshold("greedy13", 2, 2) == Fraction(1, 3)
    assert bound_threshold("mr-m", 2, 2) is None


def test_bench_delta_le_m_sweep(tmp_path, capsys):
    sweep = write_sweep(tmp_path, [{
        "name": "dle", "repetitions": 100,
        "params": {"n": 9, "m": 2, "budget": 4, "horizon": 14, "duration": [1, 3],
                   "cost": [0.5, 3], "profit": [1, 10], "require_delta_le_m": True}}],
        algorithms=["greedy14", "greedy13", "oracle"])
    out = tmp_path / "out"
    assert cli.main(["bench", str(sweep), "--out-dir", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["bound_violations"] == 0 and summary["instances"] == 100
    assert summary["algorithms"]["greedy13"]["bound_checked"] == 100
    rows = list(csv.reader((out / "bench.csv").open()))
    assert rows[0] == CSV_HEADER and len(rows) == 301


def test_bench_delta_gt_m_rows_unchecked(tmp_path):
    sweep = write_sweep(tmp_path, [{
        "name": "dense", "repetitions": 10,
        "params": {"n": 10, "m": 1, "budget": 4, "horizon": 5, "duration": [2, 4]}}],
        algorithms=["greedy14", "greedy13"])
    res = run_bench(load_sweep(sweep), tmp_path / "o")
    assert len(res.rows) == 20
    assert all(r.delta_deg > r.m and r.bound_ok is None for r in res.rows)
    assert res.summary["bound_violations"] == 0


def test_bench_zero_repetitions(tmp_path):
    sweep = write_sweep(tmp_path, [{"name": "none", "repetitions": 0,
                                    "params": {"n": 5, "m": 1, "budget": 2, "horizon": 8}}])
    assert cli.main(["bench", str(sweep), "--out-dir", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "bench.csv").read_text() == ",".join(CSV_HEADER) + "\n"


def test_bench_parallel_matches_serial(tmp_path, monkeypatch):
    sweep = write_sweep(tmp_path, [
        {"name": "a", "repetitions": 12, "params": {"n": 8, "m": 2, "budget": 3, "horizon": 12}},
        {"name": "b", "repetitions": 6, "params": {"n": 6, "m": 2, "budget": 2, "horizon": 9, "unit_cost": True}},
    ], algorithms=["greedy14", "greedy13", "mr-m", "oracle", "dp-unit"])
    assert cli.main(["bench", str(sweep), "--out-dir", str(tmp_path / "s")]) == 0
    monkeypatch.setenv("MDSP_WORKERS", "3")
    assert cli.main(["bench", str(sweep), "--out-dir", str(tmp_path / "p")]) == 0
    assert (tmp_path / "s" / "bench.csv").read_bytes() == (tmp_path / "p" / "bench.csv").read_bytes()


def test_bench_timing_fills_wall_ms(tmp_path):
    sweep = write_sweep(tmp_path, [{"name": "t", "repetitions": 2,
                                    "params": {"n": 5, "m": 1, "budget": 2, "horizon": 8}}],
                        algorithms=["greedy13"])
    cli.main(["bench", str(sweep), "--out-dir", str(tmp_path / "o"), "--timing"])
    rows = list(csv.DictReader((tmp_path / "o" / "bench.csv").open()))
    assert all(r["wall_ms"] for r in rows)


@pytest.mark.parametrize("sweep", [
    {"sets": [], "bogus": 1},
    {"sets": [{"name": "x", "params": {"n": 1, "m": 1, "budget": 1, "horizon": 5, "colour": 1}}]},
    {"sets": [], "algorithms": ["nope"]},
])
def test_bad_sweep(tmp_path, sweep):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sweep))
    assert cli.main(["bench", str(path), "--out-dir", str(tmp_path / "o")]) == cli.EXIT_PARSE
