"""
Prediction and evaluation use cases.
"""
from typing import Any, Dict, Optional, Tuple

from pfnlab.core.models.dataset import DatasetSource
from pfnlab.core.models.inference import InferenceConfig
from pfnlab.core.models.preprocessing import PreparedTable
from pfnlab.core.models.results import EvaluationOutcome, PredictionOutcome
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.dataset_repository import DatasetRepositoryPort
from pfnlab.core.ports.report_writer import ReportWriterPort
from pfnlab.core.services.inference import predict_split
from pfnlab.core.services.metrics import score_predictions
from pfnlab.core.services.splitting import train_test_split
from pfnlab.core.usecases.checkpoint_loading import CheckpointLoading
from pfnlab.infrastructure.logging import log_operation


class PredictUseCase(CheckpointLoading):
    """Predicts the test split of a dataset with its training split as support."""

    def __init__(
        self,
        dataset_repository: DatasetRepositoryPort,
        checkpoint_store: CheckpointStorePort,
        report_writer: ReportWriterPort,
    ):
        self.dataset_repository = dataset_repository
        self.checkpoint_store = checkpoint_store
        self.report_writer = report_writer

    def predict_test_split(
        self,
        source: DatasetSource,
        checkpoint_path: str,
        inference: InferenceConfig,
    ) -> Tuple[PredictionOutcome, PreparedTable]:
        """
        Raises:
            CheckpointMismatchError: If the checkpoint was trained for another task
            SupportBudgetExceededError: If full-context support exceeds the budget
        """
        dataset = self.dataset_repository.load(source.path, source.schema, source.task)
        train_split, test_split = train_test_split(dataset, source.split)
        model = self.load_model_for_task(checkpoint_path, source.task, transfer_head=False)
        return predict_split(model, train_split, test_split, inference)

    @log_operation("predict")
    def execute(
        self,
        source: DatasetSource,
        checkpoint_path: str,
        inference: InferenceConfig,
        out_path: Optional[str] = None,
    ) -> PredictionOutcome:
        """
        Args:
            source: Dataset location, schema and split
            checkpoint_path: Model checkpoint
            inference: Full-context or ensemble settings
            out_path: Predictions CSV, not written when unset

        Returns:
            Predictions with labels or targets decoded to the original scale
        """
        outcome, _ = self.predict_test_split(source, checkpoint_path, inference)
        if out_path is not None:
            self.report_writer.write_predictions(outcome.predictions, out_path, decoded=outcome.decoded)
        return outcome


class EvaluateUseCase:
    """Scores test-split predictions: accuracy or R^2 on the original scale."""

    def __init__(self, predict_use_case: PredictUseCase, report_writer: ReportWriterPort):
        self.predict_use_case = predict_use_case
        self.report_writer = report_writer

    @log_operation("evaluate")
    def execute(
        self,
        source: DatasetSource,
        checkpoint_path: str,
        inference: InferenceConfig,
        summary_path: Optional[str] = None,
        predictions_path: Optional[str] = None,
    ) -> EvaluationOutcome:
        outcome, test = self.predict_use_case.predict_test_split(source, checkpoint_path, inference)
        metrics = score_predictions(outcome, test)
        summary: Dict[str, Any] = {
            "dataset": source.path,
            "task": source.task.value,
            "checkpoint": checkpoint_path,
            "mode": inference.mode.value,
            "n_support": outcome.n_support,
            "n_test": metrics.n_test,
            "metric": "accuracy" if metrics.accuracy is not None else "r2",
            "value": float(metrics.value),
        }
        if summary_path is not None:
            self.report_writer.write_evaluation(summary, summary_path)
        if predictions_path is not None:
            self.report_writer.write_predictions(outcome.predictions, predictions_path, decoded=outcome.decoded)
        return EvaluationOutcome(metrics=metrics, prediction=outcome, summary=summary)
