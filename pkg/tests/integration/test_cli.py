#!/usr/bin/env python3
"""
Command-line integration tests.
Each test drives `main` end to end against files in a temporary directory.
"""
import os
from unittest.mock import MagicMock

import pandas as pd
import pytest
import torch
import yaml

from pfnlab.adapters.repositories.csv_dataset_repository import CsvDatasetRepository
from pfnlab.adapters.storage.torch_checkpoint_store import TorchCheckpointStore
from pfnlab.cli.dependencies import DependencyContainer
from pfnlab.cli.main import EXIT_OK, EXIT_USER_ERROR, main
from pfnlab.config.app_settings import AppSettings
from pfnlab.core.models.dataset import SplitSpec, TaskKind
from pfnlab.core.services.prior import prior_schema
from tests.utils.tabular_helpers import TabularTestHelpers


@pytest.fixture
def write_config(tmp_path, blob_csv):
    """Writes an experiment config with the blob dataset and returns its path."""
    def _write(name: str = "experiment.yaml", **sections) -> str:
        sections.setdefault("dataset", TabularTestHelpers.dataset_section(blob_csv, 3))
        config = TabularTestHelpers.experiment_config(**sections)
        return TabularTestHelpers.write_config(str(tmp_path / name), config)
    return _write


@pytest.fixture
def pretrained(tmp_path, write_config, container) -> str:
    """best.ckpt of a short pretraining run."""
    run_dir = str(tmp_path / "pretrain")
    assert main(["pretrain", write_config(), "--run-dir", run_dir], container) == EXIT_OK
    return os.path.join(run_dir, "best.ckpt")


def _read_lines(path: str):
    with open(path, encoding="utf-8") as handle:
        return handle.read().splitlines()


def _read_yaml(path: str):
    with open(path, encoding="utf-8") as handle:
        return yaml.safe_load(handle)


@pytest.mark.integration
def test_pretrain_writes_log_checkpoints_and_config(tmp_path, write_config, container, capsys):
    run_dir = tmp_path / "run"
    assert main(["pretrain", write_config(), "--run-dir", str(run_dir)], container) == EXIT_OK

    lines = _read_lines(str(run_dir / "metrics.log"))
    assert len(lines) == 10
    assert [line.split("\t")[0] for line in lines] == [str(step) for step in range(1, 11)]
    assert lines[0].endswith("\tnan")
    assert not lines[-1].endswith("\tnan")
    for name in ("best.ckpt", "final.ckpt", "step-10.ckpt", "config.yaml"):
        assert (run_dir / name).exists(), name

    frozen = _read_yaml(str(run_dir / "config.yaml"))
    assert frozen["train"]["learning_rate"] == 3e-4
    assert frozen["prior"]["seed"] == 0
    assert f"run_dir: {run_dir}" in capsys.readouterr().out


@pytest.mark.integration
def test_pretrain_is_reproducible(tmp_path, write_config, container):
    config = write_config()
    for name in ("first", "second"):
        assert main(["pretrain", config, "--run-dir", str(tmp_path / name)], container) == EXIT_OK

    assert _read_lines(str(tmp_path / "first" / "metrics.log")) == _read_lines(str(tmp_path / "second" / "metrics.log"))
    store = TorchCheckpointStore()
    first = store.load_model(str(tmp_path / "first" / "best.ckpt"))
    second = store.load_model(str(tmp_path / "second" / "best.ckpt"))
    for name, tensor in first.state_dict().items():
        assert torch.equal(tensor, second.state_dict()[name])


@pytest.mark.integration
def test_resumed_pretraining_continues_the_same_log(tmp_path, write_config, container):
    config = write_config()
    run_dir = tmp_path / "run"
    assert main(["pretrain", config, "--run-dir", str(run_dir), "--train.eval_every=5"], container) == EXIT_OK
    uninterrupted = _read_lines(str(run_dir / "metrics.log"))

    resume = str(run_dir / "step-5.ckpt")
    assert main(["pretrain", config, "--resume", resume, "--train.eval_every=5"], container) == EXIT_OK
    assert _read_lines(str(run_dir / "metrics.log")) == uninterrupted


@pytest.mark.integration
def test_unknown_config_key_exits_with_a_user_error(tmp_path, write_config, container, capsys):
    config = write_config(train={"leraning_rate": 0.1})
    code = main(["pretrain", config, "--run-dir", str(tmp_path / "run")], container)
    assert code == EXIT_USER_ERROR
    assert "train.leraning_rate" in capsys.readouterr().err
    assert not (tmp_path / "run" / "config.yaml").exists()


@pytest.mark.integration
def test_unknown_subcommand_exits_with_a_user_error(container, capsys):
    assert main(["train"], container) == EXIT_USER_ERROR
    assert capsys.readouterr().err.startswith("error: ")


@pytest.mark.integration
def test_existing_run_directory_is_not_overwritten(tmp_path, write_config, container, capsys):
    run_dir = str(tmp_path / "run")
    assert main(["pretrain", write_config(), "--run-dir", run_dir, "--max-steps", "1"], container) == EXIT_OK
    assert main(["pretrain", write_config(), "--run-dir", run_dir, "--max-steps", "1"], container) == EXIT_USER_ERROR
    assert "--run-dir" in capsys.readouterr().err


@pytest.mark.integration
def test_finetune_requires_a_checkpoint(tmp_path, write_config, container, capsys):
    code = main(["finetune", write_config(), "--run-dir", str(tmp_path / "run")], container)
    assert code == EXIT_USER_ERROR
    assert "--checkpoint" in capsys.readouterr().err


@pytest.mark.integration
def test_finetune_rejects_a_checkpoint_of_another_shape(tmp_path, write_config, container, pretrained, capsys):
    code = main(
        ["finetune", write_config(), "--checkpoint", pretrained, "--run-dir", str(tmp_path / "tuned"),
         "--model.hidden_dim=32"],
        container,
    )
    assert code == EXIT_USER_ERROR
    assert "hidden_dim" in capsys.readouterr().err


@pytest.mark.integration
def test_finetune_from_a_pretrained_checkpoint(tmp_path, write_config, container, pretrained):
    run_dir = tmp_path / "tuned"
    code = main(
        ["finetune", write_config(), "--checkpoint", pretrained, "--run-dir", str(run_dir), "--max-steps", "4"],
        container,
    )
    assert code == EXIT_OK
    assert len(_read_lines(str(run_dir / "metrics.log"))) <= 4
    assert _read_yaml(str(run_dir / "config.yaml"))["train"]["learning_rate"] == 1e-5
    assert (run_dir / "best.ckpt").exists()


@pytest.mark.integration
def test_scratch_freezes_its_regime_defaults(tmp_path, write_config, container):
    run_dir = tmp_path / "scratch"
    assert main(["scratch", write_config(), "--run-dir", str(run_dir)], container) == EXIT_OK

    frozen = _read_yaml(str(run_dir / "config.yaml"))
    assert frozen["train"]["learning_rate"] == 1e-4
    assert frozen["train"]["weight_decay"] == 1e-5
    assert (run_dir / "best.ckpt").exists()


@pytest.mark.integration
def test_named_flags_win_over_dotted_overrides(tmp_path, write_config, container):
    run_dir = tmp_path / "scratch"
    code = main(
        ["scratch", write_config(), "--run-dir", str(run_dir), "--train.learning_rate=0.01",
         "--learning-rate", "0.002", "--max-steps", "2"],
        container,
    )
    assert code == EXIT_OK
    frozen = _read_yaml(str(run_dir / "config.yaml"))
    assert frozen["train"]["learning_rate"] == 0.002
    assert frozen["train"]["max_steps"] == 2


@pytest.mark.integration
def test_environment_seed_overrides_the_file(tmp_path, write_config, monkeypatch, runs_root):
    monkeypatch.setenv("PFNLAB_SEED", "5")
    container = DependencyContainer(settings=AppSettings(runs_root=str(runs_root)))
    run_dir = tmp_path / "dump"
    assert main(["dump-prior", write_config(), "--run-dir", str(run_dir), "--n", "1"], container) == EXIT_OK
    frozen = _read_yaml(str(run_dir / "config.yaml"))
    assert frozen["seed"] == 5
    assert frozen["prior"]["seed"] == 5


@pytest.mark.integration
def test_predict_and_evaluate_a_scratch_model(tmp_path, write_config, container, capsys):
    config = write_config()
    assert main(["scratch", config, "--run-dir", str(tmp_path / "scratch")], container) == EXIT_OK
    checkpoint = str(tmp_path / "scratch" / "best.ckpt")

    assert main(["predict", config, "--checkpoint", checkpoint, "--run-dir", str(tmp_path / "pred")], container) == EXIT_OK
    predictions = pd.read_csv(tmp_path / "pred" / "predictions.csv")
    assert list(predictions.columns) == ["pred", "p_0", "p_1"]
    assert len(predictions) == 12

    code = main(
        ["evaluate", config, "--checkpoint", checkpoint, "--run-dir", str(tmp_path / "eval"),
         "--mode", "ensemble", "--subset-size", "20", "--n-ensembles", "2"],
        container,
    )
    assert code == EXIT_OK
    summary = _read_yaml(str(tmp_path / "eval" / "evaluation.yaml"))
    assert summary["metric"] == "accuracy"
    assert summary["n_test"] == 12
    assert summary["mode"] == "ensemble"
    assert 0.0 <= summary["value"] <= 1.0
    assert "accuracy: " in capsys.readouterr().out


@pytest.mark.integration
def test_predict_without_checkpoint(tmp_path, write_config, container):
    assert main(["predict", write_config(), "--run-dir", str(tmp_path / "pred")], container) == EXIT_USER_ERROR


@pytest.mark.integration
def test_compare_needs_two_variants(tmp_path, write_config, container, blob_csv, capsys):
    bench = {
        "variants": [{"name": "scratch", "method": "scratch"}],
        "datasets": [{"id": "blobs", "dataset": TabularTestHelpers.dataset_section(blob_csv, 3)}],
    }
    code = main(["compare", write_config(bench=bench), "--run-dir", str(tmp_path / "cmp")], container)
    assert code == EXIT_USER_ERROR
    assert "2 variants" in capsys.readouterr().err


@pytest.mark.integration
def test_compare_scratch_against_icl(tmp_path, write_config, container, blob_csv, pretrained, capsys):
    bench = {
        "variants": [
            {"name": "scratch", "method": "scratch"},
            {"name": "icl", "method": "icl"},
            {"name": "icl-ens", "method": "icl", "inference": {"mode": "ensemble", "subset_size": 20, "n_ensembles": 2}},
        ],
        "datasets": [{"id": "blobs", "dataset": TabularTestHelpers.dataset_section(blob_csv, 3)}],
        "checkpoint": pretrained,
    }
    run_dir = tmp_path / "cmp"
    capsys.readouterr()
    assert main(["compare", write_config(bench=bench), "--run-dir", str(run_dir)], container) == EXIT_OK

    cells = pd.read_csv(run_dir / "report.csv")
    assert cells["variant"].tolist() == ["scratch", "icl", "icl-ens"]
    assert cells["normalized"].min() == 0.0 or cells["normalized"].nunique() == 1
    assert cells["normalized"].max() == 1.0
    rendered = capsys.readouterr().out
    assert rendered == (run_dir / "report.txt").read_text(encoding="utf-8")
    assert "ICL" in rendered and "Scratch" in rendered


@pytest.mark.integration
def test_compare_uses_the_configured_splits(tmp_path, write_config, container, blob_csv):
    own = dict(TabularTestHelpers.dataset_section(blob_csv, 3), train_fraction=0.5, split_seed=7)
    shared = dict(TabularTestHelpers.dataset_section(blob_csv, 3), train_fraction=0.6)
    bench = {
        "variants": [{"name": "a", "method": "scratch"}, {"name": "b", "method": "scratch"}],
        "datasets": [{"id": "blobs", "dataset": own}],
        "synthetic_suite": {"n_classification": 1, "row_range": [40, 40]},
    }
    use_case = MagicMock()
    use_case.execute.return_value.rendered = ""
    container._compare_variants_use_case = use_case

    config = write_config(dataset=shared, bench=bench)
    assert main(["compare", config, "--run-dir", str(tmp_path / "cmp")], container) == EXIT_OK

    datasets = use_case.execute.call_args.args[0]
    assert datasets[0].split == SplitSpec(train_fraction=0.5, seed=7)
    assert datasets[1].split is None
    assert use_case.execute.call_args.kwargs["split"] == SplitSpec(train_fraction=0.6, seed=0)


@pytest.mark.integration
def test_dump_prior_writes_loadable_csv_files(tmp_path, write_config, container):
    out_dir = tmp_path / "prior"
    code = main(
        ["dump-prior", write_config(), "--run-dir", str(tmp_path / "run"), "--n", "3", "--out", str(out_dir)],
        container,
    )
    assert code == EXIT_OK
    files = sorted(os.listdir(out_dir))
    assert files == ["prior-000.csv", "prior-001.csv", "prior-002.csv"]

    repository = CsvDatasetRepository()
    for name in files:
        path = str(out_dir / name)
        n_features = len(_read_lines(path)[0].split(",")) - 1
        dataset = repository.load(path, prior_schema(n_features), TaskKind.CLASSIFICATION)
        assert 20 <= dataset.n_rows <= 60
        assert 2 <= n_features <= 4
