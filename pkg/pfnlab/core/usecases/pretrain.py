"""
Pretraining use case.
"""
from typing import Optional

from pfnlab.core.models.results import TrainingOutcome
from pfnlab.core.models.training import PriorConfig, TrainConfig
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.training_recorder import TrainingRecorderPort
from pfnlab.core.services.training_loop import pretrain
from pfnlab.core.usecases.checkpoint_loading import CheckpointLoading
from pfnlab.infrastructure.logging import log_operation


class PretrainUseCase(CheckpointLoading):
    """Trains a fresh model on episodes drawn from the synthetic prior."""

    def __init__(self, checkpoint_store: CheckpointStorePort):
        self.checkpoint_store = checkpoint_store

    @log_operation("pretrain")
    def execute(
        self,
        model_config: ModelConfig,
        prior_config: PriorConfig,
        train_config: TrainConfig,
        recorder: Optional[TrainingRecorderPort] = None,
        best_path: Optional[str] = None,
        final_path: Optional[str] = None,
        resume_path: Optional[str] = None,
        support_fraction: Optional[float] = None,
    ) -> TrainingOutcome:
        """
        Args:
            model_config: Model shape; the task must be classification
            prior_config: Prior the episodes are sampled from
            train_config: Pretraining settings
            recorder: Receives the metrics log and checkpoints
            best_path: Where the best-scoring parameters are written
            final_path: Where the final parameters are written
            resume_path: Training checkpoint to continue from
            support_fraction: Support share of each episode, random when unset

        Returns:
            Outcome whose model holds the final parameters

        Raises:
            ConfigurationError: On an invalid regime, task or prior
            CheckpointMismatchError: If the resumed run used another model config
            TrainingError: On prior degeneracy or non-finite updates
        """
        resume = self.load_resume(resume_path, model_config, recorder)
        model, history, state = pretrain(
            model_config, prior_config, train_config, recorder, resume, support_fraction
        )
        if best_path is not None:
            self.checkpoint_store.save_model(model, best_path, params=state.best_params)
        if final_path is not None:
            self.checkpoint_store.save_model(model, final_path)
        return TrainingOutcome(
            model=model,
            history=history,
            steps=state.step,
            best_step=state.best_step,
            best_metric=state.best_validation_metric,
            resumed_from=None if resume is None else int(resume["step"]),
        )
