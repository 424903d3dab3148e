import csv
import json

import numpy as np
import pytest
from typer.testing import CliRunner

from chebproto.cli import app

runner = CliRunner()


def write_wide(path, grid, rows, ids):
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id"] + [repr(float(t)) for t in grid])
        for signal_id, row in zip(ids, rows):
            writer.writerow([signal_id] + [repr(float(v)) for v in row])
    return path


@pytest.fixture
def golden_csv(tmp_path):
    t = np.linspace(0.0, 1.0, 101)
    return write_wide(tmp_path / "golden.csv", t, [1.0 - 0.5 * t, 0.5 * t], ["S1", "S2"])


@pytest.fixture
def bundles_csv(tmp_path):
    rng = np.random.default_rng(1)
    t = np.linspace(0.0, 1.0, 30)
    rows = [c + rng.uniform(-0.1, 0.1, t.size) for c in [0.0] * 4 + [10.0] * 4]
    ids = [f"low{j}" for j in range(4)] + [f"high{j}" for j in range(4)]
    return write_wide(tmp_path / "bundles.csv", t, rows, ids)


def test_approx_golden(tmp_path, golden_csv):
    out = tmp_path / "run.json"
    result = runner.invoke(app, ["approx", str(golden_csv), "--degree", "1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    (record,) = data["clusters"]
    assert record["prototype"]["delta"] == pytest.approx(0.5, abs=1e-9)
    assert record["prototype"]["termination"] == "optimal-double-point"
    assert record["prototype"]["certificate"]["double_point"] == 0
    assert len(record["prototype"]["history"]) == record["prototype"]["iterations"]
    assert record["prototype"]["warm_rejected"] is None
    assert out.with_suffix(".txt").exists()


def test_approx_is_reproducible(tmp_path, golden_csv):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        assert runner.invoke(app, ["approx", str(golden_csv), "-n", "2", "-o", str(out)]).exit_code == 0
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.parametrize("solver", ["lp", "cross-check"])
def test_approx_other_solvers(tmp_path, golden_csv, solver):
    out = tmp_path / "run.json"
    result = runner.invoke(app, ["approx", str(golden_csv), "--solver", solver, "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert json.loads(out.read_text())["clusters"][0]["prototype"]["delta"] == pytest.approx(0.5, abs=1e-7)


def test_approx_trace_stays_inside_delta(tmp_path, golden_csv):
    out, trace = tmp_path / "run.json", tmp_path / "trace.csv"
    result = runner.invoke(
        app, ["approx", str(golden_csv), "--basis", "chebyshev", "-o", str(out), "--trace-out", str(trace)]
    )
    assert result.exit_code == 0, result.output
    delta = json.loads(out.read_text())["clusters"][0]["prototype"]["delta"]
    with trace.open(newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 101
    assert max(max(float(r["upper_dev"]), float(r["lower_dev"])) for r in rows) <= delta + 1e-9


def test_approx_then_check_from_document(tmp_path, golden_csv):
    out = tmp_path / "run.json"
    assert runner.invoke(app, ["approx", str(golden_csv), "-o", str(out)]).exit_code == 0
    result = runner.invoke(app, ["check", str(golden_csv), "--from-doc", str(out)])
    assert result.exit_code == 0, result.output
    assert "double-point" in result.output


def test_check_document_against_other_input(tmp_path, golden_csv, bundles_csv):
    out = tmp_path / "run.json"
    assert runner.invoke(app, ["approx", str(golden_csv), "-o", str(out)]).exit_code == 0
    assert runner.invoke(app, ["check", str(bundles_csv), "--from-doc", str(out)]).exit_code == 2


@pytest.mark.parametrize("coeffs", ["0.5,0.25", "0.5,-0.25", "0.5, 0"])
def test_check_optimal_coefficients(golden_csv, coeffs):
    result = runner.invoke(app, ["check", str(golden_csv), f"--coeffs={coeffs}"])
    assert result.exit_code == 0, result.output


def test_check_rejects_a_worse_prototype(golden_csv):
    result = runner.invoke(app, ["check", str(golden_csv), "--coeffs", "0.6,0"])
    assert result.exit_code == 1
    assert "not optimal" in " ".join(result.output.split())


@pytest.mark.parametrize(
    "args",
    [[], ["--coeffs", "0.5,0", "--from-doc", "run.json"], ["--coeffs", "a,b"]],
    ids=["neither", "both", "garbage"],
)
def test_check_usage_errors(golden_csv, args):
    assert runner.invoke(app, ["check", str(golden_csv), *args]).exit_code == 2


def test_cluster_bundles(tmp_path, bundles_csv):
    out, trace = tmp_path / "run.json", tmp_path / "trace.csv"
    result = runner.invoke(
        app, ["cluster", str(bundles_csv), "--k", "2", "--degree", "0", "-o", str(out), "--trace-out", str(trace)]
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert data["converged"] is True
    assert len(data["clusters"]) == 2
    groups = {data["assignment"][f"low{j}"] for j in range(4)}, {data["assignment"][f"high{j}"] for j in range(4)}
    assert len(groups[0]) == 1 and len(groups[1]) == 1 and groups[0] != groups[1]
    assert data["objectives"]
    for objective in data["objectives"]:
        assert set(objective) == {"iteration", "total", "worst"}
        assert objective["worst"] <= objective["total"]
    for record in data["clusters"]:
        assert "history" in record["prototype"]
        assert "warm_rejected" in record["prototype"]
    with trace.open(newline="") as handle:
        clusters = {row["cluster"] for row in csv.DictReader(handle)}
    assert clusters == {"0", "1"}


def test_cluster_with_too_many_clusters(golden_csv):
    result = runner.invoke(app, ["cluster", str(golden_csv), "--k", "3"])
    assert result.exit_code == 2


def test_bad_csv_exits_with_input_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("id,0.0,1.0\nS1,1.0,nan\n")
    result = runner.invoke(app, ["approx", str(path)])
    assert result.exit_code == 2
    assert "line 2" in " ".join(result.output.split())


def test_unknown_basis_is_rejected(golden_csv):
    assert runner.invoke(app, ["approx", str(golden_csv), "--basis", "legendre"]).exit_code == 2


def test_envelope_command(tmp_path, golden_csv):
    trace = tmp_path / "env.csv"
    result = runner.invoke(app, ["envelope", str(golden_csv), "--trace-out", str(trace)])
    assert result.exit_code == 0, result.output
    assert "Lower bound" in result.output
    with trace.open(newline="") as handle:
        first = next(csv.DictReader(handle))
    assert (first["S_max"], first["S_min"], first["prototype"]) == ("1.0", "0.0", "")


def test_config_command():
    result = runner.invoke(app, ["config"])
    assert result.exit_code == 0
    assert "Tolerance" in result.output
    assert "exchange, lp, cross-check" in result.output
