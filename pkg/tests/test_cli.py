import json

import pytest

from src.harness.cli import main
from src.harness.experiment import ExperimentManifest


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_generate_writes_manifest(tmp_path, capsys):
    """It should write a preset's manifest and data and echo the paths and bounds."""
    code, out = run(capsys, "generate", "synt_simple", "--noise", "--out", str(tmp_path))
    assert code == 0
    payload = json.loads(out)
    assert payload["manifest"].endswith("synt_simple_noisy.json")
    assert payload["lam_min"] < payload["lam_max"]
    assert (tmp_path / "synt_simple_noisy.npz").exists()


def test_generate_unknown_preset(tmp_path, capsys):
    """It should exit with the configuration code for an unknown preset."""
    code, _ = run(capsys, "generate", "synt_giant", "--out", str(tmp_path))
    assert code == 2


def test_bounds(capsys):
    """It should print the lambda bounds of a benchmark."""
    code, out = run(capsys, "bounds", "synt_simple")
    assert code == 0
    payload = json.loads(out)
    assert payload["name"] == "synt_simple"
    assert payload["lam_max"] > payload["lam_min"]


def test_eval_uniform(capsys):
    """It should evaluate a uniform point at the requested fidelity."""
    code, out = run(capsys, "eval", "synt_simple", "--uniform", "0.0", "--discrete", "1")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"loss", "raw_loss", "cost_units", "clipped"}


@pytest.mark.parametrize("argv", [
    ["eval", "synt_simple"],
    ["eval", "synt_simple", "--z", "[0.0]", "--uniform", "0.0"],
    ["eval", "synt_simple", "--z", "not-json"],
    ["eval", "synt_simple", "--z", "[0.0, 0.0]"],
    ["eval", "synt_simple", "--uniform", "0.0", "--discrete", "1", "--continuous", "0.5"],
    ["bounds", "no_such_benchmark"],
])
def test_configuration_errors_exit_2(capsys, argv):
    """It should exit with code 2 on bad input."""
    code, _ = run(capsys, *argv)
    assert code == 2


def test_run_and_export(tmp_path, capsys):
    """It should run an experiment manifest and export its best-so-far curve."""
    manifest = ExperimentManifest(benchmark="synt_simple", method="random_search", budget=3, repetitions=2)
    path = tmp_path / "experiment.json"
    path.write_text(manifest.model_dump_json())

    code, out = run(capsys, "run", str(path), "--out", str(tmp_path / "results"))
    assert code == 0
    assert json.loads(out)["completed"] == [0, 1]

    csv_path = tmp_path / "curve.csv"
    runs = [str(tmp_path / "results" / f"rep_00{r}.jsonl") for r in range(2)]
    code, _ = run(capsys, "export", *runs, "--out", str(csv_path))
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "ordinal,best_so_far_mean,best_so_far_std,n_runs"
    assert len(lines) == 4


def test_run_with_failures_exits_3(tmp_path, capsys):
    """It should exit with the runtime code when a repetition fails."""
    manifest = ExperimentManifest(benchmark="synt_simple", method="cmaes", budget=5, repetitions=1)
    path = tmp_path / "experiment.json"
    path.write_text(manifest.model_dump_json())
    code, _ = run(capsys, "run", str(path), "--out", str(tmp_path / "results"))
    assert code == 3


def test_fidelity_corr(capsys):
    """It should print a 5x5 correlation matrix."""
    code, out = run(capsys, "fidelity-corr", "synt_simple", "--probes", "5", "--seed", "2")
    assert code == 0
    matrix = json.loads(out)
    assert len(matrix) == 5 and all(len(row) == 5 for row in matrix)
    assert all(matrix[i][i] == 1.0 for i in range(5))


def test_estimate_effective_dim(capsys):
    """It should print an effective dimension between 0 and d."""
    code, out = run(capsys, "estimate-de", "synt_simple", "--budget", "3")
    assert code == 0
    payload = json.loads(out)
    assert 0 <= payload["effective_dim"] <= 60
