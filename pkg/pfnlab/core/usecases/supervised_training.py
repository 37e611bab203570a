"""
Fine-tuning and training-from-scratch use case.
"""
import logging
from typing import Optional

from pfnlab.core.models.dataset import DatasetSource
from pfnlab.core.models.errors import ConfigurationError
from pfnlab.core.models.inference import InferenceConfig
from pfnlab.core.models.results import TrainingOutcome
from pfnlab.core.models.training import TrainConfig, TrainRegime
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.dataset_repository import DatasetRepositoryPort
from pfnlab.core.ports.training_recorder import TrainingRecorderPort
from pfnlab.core.services.splitting import carve_validation, train_test_split
from pfnlab.core.services.tabular_constraints import TabularConstraints
from pfnlab.core.services.training_loop import finetune, train_scratch
from pfnlab.core.usecases.checkpoint_loading import CheckpointLoading
from pfnlab.infrastructure.logging import log_operation

logger = logging.getLogger(__name__)


class SupervisedTrainingUseCase(CheckpointLoading):
    """
    Trains on the training split of a configured dataset, with early stopping
    on a validation part carved out of it. The test split is left untouched.
    """

    def __init__(self, dataset_repository: DatasetRepositoryPort, checkpoint_store: CheckpointStorePort):
        self.dataset_repository = dataset_repository
        self.checkpoint_store = checkpoint_store

    @log_operation("supervised_training")
    def execute(
        self,
        source: DatasetSource,
        model_config: ModelConfig,
        train_config: TrainConfig,
        inference: Optional[InferenceConfig] = None,
        recorder: Optional[TrainingRecorderPort] = None,
        checkpoint_path: Optional[str] = None,
        best_path: Optional[str] = None,
        resume_path: Optional[str] = None,
        validation_fraction: float = TabularConstraints.DEFAULT_VALIDATION_FRACTION,
    ) -> TrainingOutcome:
        """
        Args:
            source: Dataset location, schema and split
            model_config: Model shape, with the dataset's task
            train_config: Fine-tune or scratch settings; the regime picks the path
            inference: Prediction settings for validation scoring
            recorder: Receives the metrics log and checkpoints
            checkpoint_path: Pretrained model (fine-tuning only)
            best_path: Where the best validation parameters are written
            resume_path: Training checkpoint to continue from
            validation_fraction: Share of the training split held out for early stopping

        Returns:
            Outcome whose model holds the best validation parameters

        Raises:
            ConfigurationError: On fine-tuning without a checkpoint or an unsupported regime
            DataValidationError: If the dataset fails to load or split
            CheckpointMismatchError: If the checkpoint does not fit `model_config`
        """
        regime = train_config.regime
        if regime == TrainRegime.FINETUNE and checkpoint_path is None:
            raise ConfigurationError(
                "Fine-tuning needs a pretrained --checkpoint; use 'scratch' to train from a fresh model"
            )
        if regime not in (TrainRegime.FINETUNE, TrainRegime.SCRATCH):
            raise ConfigurationError(f"Regime {regime.value} is not a supervised regime", regime=regime.value)

        dataset = self.dataset_repository.load(source.path, source.schema, source.task)
        train_split, _ = train_test_split(dataset, source.split)
        fit, validation = carve_validation(train_split, validation_fraction, train_config.seed)
        logger.info(
            "Prepared splits",
            extra={"extra_fields": {
                "fit_rows": fit.n_rows,
                "validation_rows": validation.n_rows,
                "regime": regime.value,
            }},
        )

        model_config = model_config.for_task(source.task)
        resume = self.load_resume(resume_path, model_config, recorder)
        if regime == TrainRegime.FINETUNE:
            model = self.load_model_for_task(checkpoint_path, source.task, expected=model_config)
            model, history, state = finetune(model, fit, validation, train_config, recorder, inference, resume)
        else:
            model, history, state = train_scratch(
                model_config, fit, validation, train_config, recorder, inference, resume
            )

        if best_path is not None:
            self.checkpoint_store.save_model(model, best_path)
        return TrainingOutcome(
            model=model,
            history=history,
            steps=state.step,
            best_step=state.best_step,
            best_metric=state.best_validation_metric,
            resumed_from=None if resume is None else int(resume["step"]),
        )
