import json

import pytest

from mcrp.cli import run
from mcrp.model import ReconfigurationPlan
from mcrp.serialization import serialize_plan


@pytest.fixture(scope="module")
def instance_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "inst.json"
    args = ["gen", "--preset", "static", "--out", str(path), "--seed", "3"]
    assert run(args + ["--J", "8", "--N", "3", "--K", "2", "--T", "240", "--P", "6"]) == 0
    return path


def _solve(instance_file, out, *extra):
    return run(["solve", "--instance", str(instance_file), "--out", str(out), *extra])


def test_gen_is_deterministic(instance_file, tmp_path):
    again = tmp_path / "again.json"
    run(["gen", "--preset", "static", "--out", str(again), "--seed", "3", "--J", "8", "--N", "3", "--K", "2",
         "--T", "240", "--P", "6"])
    assert again.read_text() == instance_file.read_text()


@pytest.mark.parametrize("method", ["exact", "bruteforce", "mp", "baseline"])
def test_solve_writes_plan_and_report(instance_file, tmp_path, method):
    assert _solve(instance_file, tmp_path, "--method", method) == 0
    plan = json.loads((tmp_path / "plan.json").read_text())
    report = json.loads((tmp_path / "report.json").read_text())
    assert plan["objective"] == report["objective"]
    assert len(plan["assignment"]) == 3


def test_solve_ub_writes_report_only(instance_file, tmp_path):
    assert _solve(instance_file, tmp_path, "--method", "ub") == 0
    assert not (tmp_path / "plan.json").exists()
    assert json.loads((tmp_path / "report.json").read_text())["objective"] is None


def test_rhp_requires_lookahead(instance_file, tmp_path, capsys):
    assert _solve(instance_file, tmp_path, "--method", "rhp") == 1
    assert "lookahead" in capsys.readouterr().err
    assert _solve(instance_file, tmp_path, "--method", "rhp", "--lookahead", "5") == 1
    assert _solve(instance_file, tmp_path, "--method", "rhp", "--lookahead", "1") == 0


def test_threads_do_not_change_results(instance_file, tmp_path):
    _solve(instance_file, tmp_path / "a", "--method", "exact", "--threads", "1")
    _solve(instance_file, tmp_path / "b", "--method", "exact", "--threads", "4")
    assert (tmp_path / "a" / "plan.json").read_text() == (tmp_path / "b" / "plan.json").read_text()


def test_evaluate(instance_file, tmp_path):
    _solve(instance_file, tmp_path, "--method", "exact")
    out = tmp_path / "eval.json"
    assert run(["evaluate", "--instance", str(instance_file), "--plan", str(tmp_path / "plan.json"),
                "--out", str(out)]) == 0
    solved = json.loads((tmp_path / "report.json").read_text())
    assert json.loads(out.read_text())["objective"] == solved["objective"]


def test_evaluate_flags_infeasible_plans(instance_file, tmp_path, capsys):
    greedy = tmp_path / "greedy.json"
    # jumping half way round the orbit every stage overruns a 0.6 km/s budget
    greedy.write_text(serialize_plan(ReconfigurationPlan(((4, 4), (0, 0), (4, 4)))))
    out = tmp_path / "eval.json"
    code = run(["evaluate", "--instance", str(instance_file), "--plan", str(greedy), "--out", str(out)])
    assert code == 1
    assert "infeasible" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text(serialize_plan(ReconfigurationPlan(((99, 0), (0, 0), (0, 0)))))
    assert run(["evaluate", "--instance", str(instance_file), "--plan", str(bad), "--out", str(out)]) == 1


def test_export_lp(instance_file, tmp_path):
    out = tmp_path / "model.lp"
    assert run(["export-lp", "--instance", str(instance_file), "--out", str(out)]) == 0
    assert out.read_text().startswith("\\") and "Binaries" in out.read_text()


def test_report(instance_file, tmp_path):
    paths = []
    for method in ("baseline", "exact"):
        _solve(instance_file, tmp_path / method, "--method", method)
        paths.append(str(tmp_path / method / "report.json"))
    out = tmp_path / "tables"
    assert run(["report", "--instance", str(instance_file), "--reports", *paths, "--out", str(out)]) == 0
    assert (out / "summary.csv").read_text().count("\n") == 3
    assert (out / "series.csv").read_text().count("\n") == 1 + 2 * 3


def test_usage_and_input_errors(tmp_path, capsys):
    assert run([]) == 1
    assert run(["solve", "--instance", str(tmp_path / "missing.json"), "--out", str(tmp_path),
                "--method", "exact"]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text('{"schema_version": 1}')
    assert run(["solve", "--instance", str(broken), "--out", str(tmp_path), "--method", "exact"]) == 1
    assert "time_grid" in capsys.readouterr().err
    assert run(["gen", "--preset", "harvey", "--stages", "5", "--out", str(tmp_path / "h.json")]) == 1
