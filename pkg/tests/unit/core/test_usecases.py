"""
Unit tests for the pfnlab use cases.

Ports are mocked; the training and inference services run for real on
small inputs.
"""
import os
from unittest.mock import MagicMock, call, patch

import numpy as np
import pytest

from pfnlab.core.models.dataset import DatasetSource, SplitSpec, TaskKind
from pfnlab.core.models.errors import (
    CheckpointMismatchError,
    ConfigurationError,
    InsufficientVariantsError,
)
from pfnlab.core.models.inference import InferenceConfig, InferenceMode, Predictions
from pfnlab.core.models.preprocessing import LabelEncoding, PreparedTable, PreprocessState, ProcessedMatrix
from pfnlab.core.models.results import PredictionOutcome
from pfnlab.core.models.scores import BenchDataset, VariantMethod, VariantSpec
from pfnlab.core.models.training import TrainConfig, TrainRegime
from pfnlab.core.services.retrieval_transformer import RetrievalTransformer
from pfnlab.core.usecases.compare_variants import CompareVariantsUseCase
from pfnlab.core.usecases.dump_prior import DumpPriorUseCase
from pfnlab.core.usecases.prediction import EvaluateUseCase, PredictUseCase
from pfnlab.core.usecases.pretrain import PretrainUseCase
from pfnlab.core.usecases.supervised_training import SupervisedTrainingUseCase
from tests.utils.mock_helpers import MockHelpers
from tests.utils.tabular_helpers import TabularTestHelpers


def _source(task: TaskKind = TaskKind.CLASSIFICATION) -> DatasetSource:
    return DatasetSource(
        path="data/blobs.csv",
        schema=TabularTestHelpers.numeric_schema(3),
        task=task,
        split=SplitSpec(0.8, seed=0),
    )


class TestSupervisedTrainingUseCase:
    """Test SupervisedTrainingUseCase class."""

    @pytest.fixture
    def use_case(self, blob_dataset, mock_checkpoint_store):
        repository = MockHelpers.create_mock_dataset_repository(blob_dataset)
        return SupervisedTrainingUseCase(repository, mock_checkpoint_store)

    @pytest.mark.unit
    def test_finetune_without_checkpoint_is_rejected(self, use_case, small_model_config):
        config = TrainConfig(regime=TrainRegime.FINETUNE, max_steps=2)
        with pytest.raises(ConfigurationError) as error:
            use_case.execute(_source(), small_model_config, config)
        assert "--checkpoint" in error.value.message
        use_case.dataset_repository.load.assert_not_called()

    @pytest.mark.unit
    def test_pretrain_regime_is_not_supervised(self, use_case, small_model_config):
        with pytest.raises(ConfigurationError):
            use_case.execute(_source(), small_model_config, TrainConfig(regime=TrainRegime.PRETRAIN))

    @pytest.mark.unit
    def test_scratch_trains_and_saves_the_best_model(self, use_case, small_model_config):
        config = TrainConfig(regime=TrainRegime.SCRATCH, max_steps=3, eval_every=1)
        outcome = use_case.execute(_source(), small_model_config, config, best_path="best.ckpt")

        use_case.dataset_repository.load.assert_called_once()
        use_case.checkpoint_store.save_model.assert_called_once_with(outcome.model, "best.ckpt")
        assert outcome.steps == 3
        assert 1 <= outcome.best_step <= 3
        assert outcome.resumed_from is None
        assert len(outcome.history) == 3

    @pytest.mark.unit
    def test_finetune_loads_the_checkpoint_for_the_dataset_task(self, use_case, small_model_config):
        use_case.checkpoint_store.load_model.return_value = RetrievalTransformer(small_model_config, seed=2)
        config = TrainConfig(regime=TrainRegime.FINETUNE, max_steps=2, eval_every=1)

        outcome = use_case.execute(_source(), small_model_config, config, checkpoint_path="pre.ckpt")
        use_case.checkpoint_store.load_model.assert_called_once_with(
            "pre.ckpt", small_model_config, ignore_task=True
        )
        assert outcome.steps == 2

    @pytest.mark.unit
    def test_resume_with_another_model_config_is_rejected(self, use_case, small_model_config):
        stored = TabularTestHelpers.small_model_config(hidden_dim=32)
        use_case.checkpoint_store.load_train_state.return_value = {"step": 2, "model_config": stored.to_dict()}
        config = TrainConfig(regime=TrainRegime.SCRATCH, max_steps=3)
        with pytest.raises(CheckpointMismatchError) as error:
            use_case.execute(_source(), small_model_config, config, resume_path="step-2.ckpt")
        assert error.value.name == "hidden_dim"


class TestPretrainUseCase:
    """Test PretrainUseCase class."""

    @pytest.mark.unit
    def test_saves_best_and_final_parameters(self, mock_checkpoint_store, small_model_config, small_prior_config):
        use_case = PretrainUseCase(mock_checkpoint_store)
        config = TrainConfig(regime=TrainRegime.PRETRAIN, max_steps=2, eval_every=1, eval_episodes=2)

        outcome = use_case.execute(
            small_model_config, small_prior_config, config, best_path="best.ckpt", final_path="final.ckpt"
        )
        calls = mock_checkpoint_store.save_model.call_args_list
        assert len(calls) == 2
        assert calls[0].args[1] == "best.ckpt"
        assert set(calls[0].kwargs["params"]) == set(outcome.model.state_dict())
        assert calls[1] == call(outcome.model, "final.ckpt")
        assert outcome.steps == 2
        assert outcome.best_step in (1, 2)


class TestPredictUseCase:
    """Test PredictUseCase and EvaluateUseCase classes."""

    @pytest.fixture
    def use_case(self, blob_dataset, small_model_config, mock_report_writer):
        repository = MockHelpers.create_mock_dataset_repository(blob_dataset)
        store = MockHelpers.create_mock_checkpoint_store(RetrievalTransformer(small_model_config, seed=0))
        return PredictUseCase(repository, store, mock_report_writer)

    @pytest.mark.unit
    def test_predictions_are_written_when_requested(self, use_case):
        outcome = use_case.execute(_source(), "best.ckpt", InferenceConfig(), out_path="pred.csv")
        assert outcome.n_rows == 12
        assert outcome.n_support == 48
        use_case.report_writer.write_predictions.assert_called_once_with(
            outcome.predictions, "pred.csv", decoded=outcome.decoded
        )

    @pytest.mark.unit
    def test_checkpoint_for_another_task_is_refused(self, use_case, small_model_config):
        regression = RetrievalTransformer(small_model_config.for_task(TaskKind.REGRESSION))
        use_case.checkpoint_store.load_model.return_value = regression
        with pytest.raises(CheckpointMismatchError) as error:
            use_case.execute(_source(), "best.ckpt", InferenceConfig())
        assert error.value.name == "task"

    @pytest.mark.unit
    def test_evaluation_summary(self, mock_report_writer):
        state = PreprocessState(
            feature_columns=(),
            feature_maps=(),
            category_encodings={},
            task=TaskKind.CLASSIFICATION,
            max_features=2,
            label_encoding=LabelEncoding(("no", "yes")),
        )
        test = PreparedTable(
            features=ProcessedMatrix(np.zeros((4, 2)), np.ones(4, dtype=int)),
            targets=np.array([0.0, 1.0, 1.0, 0.0]),
            state=state,
        )
        predictions = Predictions(
            task=TaskKind.CLASSIFICATION,
            probabilities=np.array([[0.9, 0.1], [0.3, 0.7], [0.6, 0.4], [0.8, 0.2]]),
        )
        outcome = PredictionOutcome(predictions, ["no", "yes", "no", "no"], n_support=16)
        predict_use_case = MagicMock()
        predict_use_case.predict_test_split.return_value = (outcome, test)

        use_case = EvaluateUseCase(predict_use_case, mock_report_writer)
        inference = InferenceConfig(mode=InferenceMode.ENSEMBLE, subset_size=8, n_ensembles=2)
        result = use_case.execute(_source(), "best.ckpt", inference, summary_path="evaluation.yaml")

        assert result.metrics.accuracy == 0.75
        assert result.summary["metric"] == "accuracy"
        assert result.summary["value"] == 0.75
        assert result.summary["mode"] == "ensemble"
        assert result.summary["n_support"] == 16
        assert result.summary["n_test"] == 4
        mock_report_writer.write_evaluation.assert_called_once_with(result.summary, "evaluation.yaml")
        mock_report_writer.write_predictions.assert_not_called()


class TestCompareVariantsUseCase:
    """Test CompareVariantsUseCase class."""

    @pytest.fixture
    def datasets(self):
        return [
            BenchDataset("blobs-a", TabularTestHelpers.blob_dataset(n_rows=40, seed=1)),
            BenchDataset("blobs-b", TabularTestHelpers.blob_dataset(n_rows=40, seed=2)),
        ]

    @pytest.fixture
    def scratch_variants(self):
        return [
            VariantSpec("scratch-a", VariantMethod.SCRATCH, InferenceConfig()),
            VariantSpec("scratch-b", VariantMethod.SCRATCH, InferenceConfig()),
        ]

    @pytest.fixture
    def train_configs(self):
        return {
            "scratch-a": TrainConfig(regime=TrainRegime.SCRATCH, max_steps=2, eval_every=1, seed=0),
            "scratch-b": TrainConfig(regime=TrainRegime.SCRATCH, max_steps=2, eval_every=1, seed=1),
        }

    @pytest.mark.unit
    def test_single_variant_is_rejected(self, mock_checkpoint_store, mock_report_writer, datasets,
                                        scratch_variants, train_configs, small_model_config):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        with pytest.raises(InsufficientVariantsError):
            use_case.execute(datasets, scratch_variants[:1], train_configs, small_model_config)

    @pytest.mark.unit
    def test_pretrained_variant_needs_a_checkpoint(self, mock_checkpoint_store, mock_report_writer, datasets,
                                                   scratch_variants, train_configs, small_model_config):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        variants = scratch_variants + [VariantSpec("icl", VariantMethod.ICL, InferenceConfig())]
        with pytest.raises(ConfigurationError):
            use_case.execute(datasets, variants, train_configs, small_model_config)

    @pytest.mark.unit
    def test_training_variant_needs_settings(self, mock_checkpoint_store, mock_report_writer, datasets,
                                             scratch_variants, small_model_config):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        with pytest.raises(ConfigurationError):
            use_case.execute(datasets, scratch_variants, {}, small_model_config)

    @pytest.mark.unit
    def test_scores_are_normalized_per_dataset(self, mock_checkpoint_store, mock_report_writer, datasets,
                                               scratch_variants, train_configs, small_model_config, tmp_path):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        report = use_case.execute(
            datasets, scratch_variants, train_configs, small_model_config, output_dir=str(tmp_path)
        )
        for dataset_id in ("blobs-a", "blobs-b"):
            for variant in ("scratch-a", "scratch-b"):
                assert 0.0 <= report.table.raw(dataset_id, variant) <= 1.0
                assert 0.0 <= report.table.normalized(dataset_id, variant) <= 1.0
        assert len(report.rendered.splitlines()) == 4
        mock_report_writer.write_comparison.assert_called_once_with(report, str(tmp_path))

    @pytest.mark.unit
    def test_failed_cells_are_left_out(self, mock_report_writer, datasets, scratch_variants,
                                       train_configs, small_model_config):
        store = MockHelpers.create_mock_checkpoint_store(model_config=small_model_config)
        store.load_model.side_effect = CheckpointMismatchError("hidden_dim", 16, 32)
        use_case = CompareVariantsUseCase(store, mock_report_writer)
        variants = scratch_variants + [VariantSpec("icl", VariantMethod.ICL, InferenceConfig())]

        report = use_case.execute(datasets, variants, train_configs, small_model_config, checkpoint_path="pre.ckpt")
        assert report.table.raw("blobs-a", "icl") is None
        assert report.table.normalized("blobs-a", "icl") is None
        assert report.table.normalized("blobs-a", "scratch-a") is not None
        store.read_model_config.assert_called_once_with("pre.ckpt")

    @pytest.mark.unit
    def test_one_failing_cell_keeps_the_rest_of_the_report(self, mock_checkpoint_store, mock_report_writer,
                                                           datasets, scratch_variants, train_configs,
                                                           small_model_config, tmp_path):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        # cells run dataset by dataset, variants in order
        scores = [0.9, 0.7, 0.8, ValueError("Need at least 2 test rows, got 1")]
        with patch.object(use_case, "run_cell", side_effect=scores):
            report = use_case.execute(
                datasets, scratch_variants, train_configs, small_model_config, output_dir=str(tmp_path)
            )

        assert report.table.normalized("blobs-a", "scratch-a") == 1.0
        assert report.table.normalized("blobs-a", "scratch-b") == 0.0
        assert report.table.raw("blobs-b", "scratch-a") == 0.8
        assert report.table.raw("blobs-b", "scratch-b") is None
        assert report.table.normalized("blobs-b", "scratch-a") is None
        assert report.table.aggregate("scratch-a") == 1.0
        assert report.table.aggregate("scratch-b") == 0.0
        mock_report_writer.write_comparison.assert_called_once_with(report, str(tmp_path))

    @pytest.mark.unit
    def test_runtime_errors_in_a_cell_are_recorded(self, mock_checkpoint_store, mock_report_writer, datasets,
                                                   scratch_variants, train_configs, small_model_config):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        scores = [RuntimeError("non-finite loss"), 0.5, 0.6, 0.4]
        with patch.object(use_case, "run_cell", side_effect=scores):
            report = use_case.execute(datasets, scratch_variants, train_configs, small_model_config)

        assert report.table.raw("blobs-a", "scratch-a") is None
        assert report.table.normalized("blobs-a", "scratch-b") is None
        assert report.table.normalized("blobs-b", "scratch-a") == 1.0
        assert report.table.normalized("blobs-b", "scratch-b") == 0.0

    @pytest.mark.unit
    def test_every_cell_failing_still_produces_a_report(self, mock_checkpoint_store, mock_report_writer, datasets,
                                                        scratch_variants, train_configs, small_model_config):
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        with patch.object(use_case, "run_cell", side_effect=RuntimeError("boom")):
            report = use_case.execute(datasets, scratch_variants, train_configs, small_model_config)

        assert len(report.table.entries) == 4
        assert report.table.aggregates == {}
        assert "-" in report.rendered

    @pytest.mark.unit
    def test_dataset_split_overrides_the_shared_one(self, mock_checkpoint_store, mock_report_writer,
                                                    scratch_variants, train_configs, small_model_config):
        own = SplitSpec(0.5, seed=3)
        shared = SplitSpec(0.75, seed=1)
        datasets = [
            BenchDataset("own", TabularTestHelpers.blob_dataset(n_rows=40, seed=1), split=own),
            BenchDataset("shared", TabularTestHelpers.blob_dataset(n_rows=40, seed=2)),
        ]
        use_case = CompareVariantsUseCase(mock_checkpoint_store, mock_report_writer)
        with patch.object(use_case, "run_cell", side_effect=[0.5, 0.6, 0.7, 0.8]) as run_cell:
            use_case.execute(datasets, scratch_variants, train_configs, small_model_config, split=shared)

        own_train = run_cell.call_args_list[0].args[1]
        shared_train = run_cell.call_args_list[2].args[1]
        assert own_train.n_rows == 20
        assert shared_train.n_rows == 30


class TestDumpPriorUseCase:
    """Test DumpPriorUseCase class."""

    @pytest.mark.unit
    def test_negative_count_is_rejected(self, mock_dataset_repository, small_prior_config, tmp_path):
        with pytest.raises(ConfigurationError):
            DumpPriorUseCase(mock_dataset_repository).execute(small_prior_config, -1, str(tmp_path))

    @pytest.mark.unit
    def test_writes_numbered_files(self, mock_dataset_repository, small_prior_config, tmp_path):
        out_dir = str(tmp_path / "prior")
        paths = DumpPriorUseCase(mock_dataset_repository).execute(small_prior_config, 3, out_dir)
        assert [os.path.basename(path) for path in paths] == ["prior-000.csv", "prior-001.csv", "prior-002.csv"]
        assert mock_dataset_repository.save.call_count == 3
        assert os.path.isdir(out_dir)
