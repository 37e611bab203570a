"""
Training regimes: pretraining on prior episodes, fine-tuning with fresh
support/query resplits at every step, and training from scratch.
"""
import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from pfnlab.core.models.dataset import Dataset, TaskKind
from pfnlab.core.models.episode import Episode
from pfnlab.core.models.errors import (
    ConfigurationError,
    DimensionMismatchError,
    NonFiniteActivationError,
    NonFiniteGradientError,
    TooManyClassesError,
)
from pfnlab.core.models.inference import InferenceConfig, InferenceMode
from pfnlab.core.models.preprocessing import PreparedTable
from pfnlab.core.models.training import PriorConfig, StepRecord, TrainConfig, TrainingHistory, TrainRegime
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.ports.training_recorder import TrainingRecorderPort
from pfnlab.core.services.inference import predict
from pfnlab.core.services.metrics import accuracy, r2_score
from pfnlab.core.services.optimizer import (
    TrainState,
    create_train_state,
    optimizer_step,
    snapshot_parameters,
)
from pfnlab.core.services.preprocessing import apply_preprocess, prepare_dataset
from pfnlab.core.services.prior import PriorSampler, validation_episodes
from pfnlab.core.services.retrieval_transformer import (
    RetrievalTransformer,
    compute_gradients,
    predict_proba,
)
from pfnlab.core.services.splitting import make_finetune_episode

logger = logging.getLogger(__name__)

SMOOTHING = 0.98

EpisodeSource = Callable[[np.random.Generator], Episode]
Evaluator = Callable[[RetrievalTransformer], float]


def run_training_loop(
    state: TrainState,
    config: TrainConfig,
    next_episode: EpisodeSource,
    evaluator: Optional[Evaluator] = None,
    recorder: Optional[TrainingRecorderPort] = None,
    early_stopping: bool = True,
) -> TrainingHistory:
    """
    Step until `max_steps` or until `patience` evaluations pass without a
    strict improvement.

    Evaluation runs every `eval_every` steps and at the last step. The best
    parameters are kept in `state.best_params`.

    Args:
        state: Training state, possibly restored from a checkpoint
        config: Optimisation settings
        next_episode: Draws the next training episode from the state's rng
        evaluator: Validation metric of the current model, higher is better
        recorder: Receives step records and checkpoint events
        early_stopping: Stop on exhausted patience

    Returns:
        History of the steps taken in this call
    """
    history = TrainingHistory()
    model = state.model

    while state.step < config.max_steps:
        model.train()
        episode = next_episode(state.rng)
        try:
            loss, grads = compute_gradients(model, episode)
        except (NonFiniteActivationError, NonFiniteGradientError) as error:
            error.context["step"] = state.step + 1
            logger.error(
                "Non-finite values during training",
                extra={"extra_fields": {"step": state.step + 1, "error": error.message}},
            )
            raise
        optimizer_step(state, grads, config)
        state.smoothed_loss = loss if state.smoothed_loss is None else (
            SMOOTHING * state.smoothed_loss + (1.0 - SMOOTHING) * loss
        )

        metric = None
        if evaluator is not None and (state.step % config.eval_every == 0 or state.step == config.max_steps):
            model.eval()
            metric = float(evaluator(model))
            _track_best(state, metric, recorder)

        record = StepRecord(state.step, loss, state.smoothed_loss, metric)
        history.append(record)
        if recorder is not None:
            recorder.record_step(record)
            if metric is not None:
                recorder.checkpoint(state)

        if metric is not None:
            logger.info(
                "Evaluation",
                extra={"extra_fields": {
                    "step": state.step,
                    "metric": metric,
                    "best": state.best_validation_metric,
                    "smoothed_loss": state.smoothed_loss,
                }},
            )
        if early_stopping and state.steps_since_best >= config.patience:
            logger.info(
                "Early stop",
                extra={"extra_fields": {"step": state.step, "best_step": state.best_step}},
            )
            break

    if evaluator is None:
        state.best_params = snapshot_parameters(model)
        state.best_step = state.step
    return history


def _track_best(state: TrainState, metric: float, recorder: Optional[TrainingRecorderPort]) -> None:
    if metric > state.best_validation_metric:
        state.best_validation_metric = metric
        state.steps_since_best = 0
        state.best_params = snapshot_parameters(state.model)
        state.best_step = state.step
        if recorder is not None:
            recorder.record_best(state)
    else:
        state.steps_since_best += 1


def _require_regime(config: TrainConfig, regime: TrainRegime) -> None:
    if config.regime != regime:
        raise ConfigurationError(
            f"Expected a {regime.value} training config, got {config.regime.value}",
            regime=config.regime.value,
        )


def _restore(state: TrainState, resume: Optional[Dict[str, Any]]) -> None:
    if resume is not None:
        state.load_state_dict(resume)
        logger.info("Resumed training state", extra={"extra_fields": {"step": state.step}})


# PRETRAINING

def zero_shot_accuracy(model: RetrievalTransformer, episodes: List[Episode]) -> float:
    """Mean query accuracy over labelled episodes, without weight updates."""
    scores = []
    for episode in episodes:
        predicted = np.argmax(predict_proba(model, episode), axis=1)
        scores.append(accuracy(predicted, episode.y_query.astype(int)).accuracy)
    return float(np.mean(scores))


def pretrain(
    model_config: ModelConfig,
    prior_config: PriorConfig,
    config: TrainConfig,
    recorder: Optional[TrainingRecorderPort] = None,
    resume: Optional[Dict[str, Any]] = None,
    support_fraction: Optional[float] = None,
) -> Tuple[RetrievalTransformer, TrainingHistory, TrainState]:
    """
    Train on a stream of prior episodes for `max_steps` steps.

    Fixed held-out prior episodes are scored every `eval_every` steps; the
    best-scoring parameters stay in the returned state, the model holds the
    final ones.
    """
    _require_regime(config, TrainRegime.PRETRAIN)
    if model_config.task != TaskKind.CLASSIFICATION:
        raise ConfigurationError("Pretraining uses the classification prior; set model.task to classification")
    try:
        prior_config.validate_against(model_config.max_features, model_config.max_classes)
    except ValueError as error:
        raise ConfigurationError(str(error)) from error

    model = RetrievalTransformer(model_config, seed=config.seed)
    state = create_train_state(model, config)
    _restore(state, resume)

    def next_episode(rng: np.random.Generator) -> Episode:
        return PriorSampler(
            prior_config, model_config.max_features, rng, support_fraction, model_config.quantile_output
        ).sample_episode()

    held_out: List[Episode] = []
    if config.max_steps > 0 and config.eval_episodes > 0:
        held_out = validation_episodes(
            prior_config, config.eval_episodes, model_config.max_features, model_config.quantile_output
        )
    evaluator = (lambda current: zero_shot_accuracy(current, held_out)) if held_out else None

    history = run_training_loop(state, config, next_episode, evaluator, recorder, early_stopping=False)
    return model, history, state


# SUPERVISED REGIMES

def validation_metric(
    model: RetrievalTransformer,
    support: PreparedTable,
    validation: PreparedTable,
    inference: InferenceConfig,
) -> float:
    """
    Accuracy (classification) or R^2 in quantile space (regression) on the
    validation rows, with the fitting rows as support.
    """
    if support.n_rows > inference.support_budget and inference.mode == InferenceMode.FULL_CONTEXT:
        inference = InferenceConfig(
            mode=InferenceMode.ENSEMBLE,
            subset_size=inference.subset_size,
            n_ensembles=inference.n_ensembles,
            seed=inference.seed,
            query_chunk_size=inference.query_chunk_size,
        )
    predictions = predict(model, support, validation.features, inference)
    if support.task == TaskKind.CLASSIFICATION:
        return accuracy(predictions.class_indices, validation.targets.astype(int)).accuracy
    return r2_score(predictions.values, validation.targets).r2


def prepare_supervised(
    model_config: ModelConfig,
    train_split: Dataset,
    validation_split: Dataset,
) -> Tuple[PreparedTable, PreparedTable]:
    """
    Fit preprocessing on the training split and apply it to both splits.

    Raises:
        DimensionMismatchError: If the model task differs from the dataset task
        TooManyClassesError: If the dataset has more classes than the model head
    """
    if model_config.task != train_split.task:
        raise DimensionMismatchError(
            f"Model task {model_config.task.value} does not match dataset task {train_split.task.value}"
        )
    table = prepare_dataset(train_split, model_config.max_features, output_kind=model_config.quantile_output)
    if table.task == TaskKind.CLASSIFICATION and table.n_classes > model_config.max_classes:
        raise TooManyClassesError(table.n_classes, model_config.max_classes)
    return table, apply_preprocess(table.state, validation_split)


def _supervised(
    model: RetrievalTransformer,
    train_split: Dataset,
    validation_split: Dataset,
    config: TrainConfig,
    recorder: Optional[TrainingRecorderPort],
    inference: Optional[InferenceConfig],
    resume: Optional[Dict[str, Any]],
) -> Tuple[RetrievalTransformer, TrainingHistory, TrainState]:
    table, validation = prepare_supervised(model.config, train_split, validation_split)
    inference = inference or InferenceConfig(seed=config.seed)
    state = create_train_state(model, config)
    _restore(state, resume)

    def next_episode(rng: np.random.Generator) -> Episode:
        return make_finetune_episode(table, config.support_fraction, rng, config.max_resplit_attempts)

    def evaluator(current: RetrievalTransformer) -> float:
        return validation_metric(current, table, validation, inference)

    history = run_training_loop(state, config, next_episode, evaluator, recorder)
    model.load_state_dict(state.best_params)
    logger.info(
        "Training finished",
        extra={"extra_fields": {
            "regime": config.regime.value,
            "steps": state.step,
            "best_step": state.best_step,
            "best_metric": state.best_validation_metric,
        }},
    )
    return model, history, state


def finetune(
    model: RetrievalTransformer,
    train_split: Dataset,
    validation_split: Dataset,
    config: TrainConfig,
    recorder: Optional[TrainingRecorderPort] = None,
    inference: Optional[InferenceConfig] = None,
    resume: Optional[Dict[str, Any]] = None,
) -> Tuple[RetrievalTransformer, TrainingHistory, TrainState]:
    """
    Fine-tune a pretrained model; returns it holding the best validation parameters.
    """
    _require_regime(config, TrainRegime.FINETUNE)
    return _supervised(model, train_split, validation_split, config, recorder, inference, resume)


def train_scratch(
    model_config: ModelConfig,
    train_split: Dataset,
    validation_split: Dataset,
    config: TrainConfig,
    recorder: Optional[TrainingRecorderPort] = None,
    inference: Optional[InferenceConfig] = None,
    resume: Optional[Dict[str, Any]] = None,
) -> Tuple[RetrievalTransformer, TrainingHistory, TrainState]:
    """Same loop as `finetune`, from a fresh initialization."""
    _require_regime(config, TrainRegime.SCRATCH)
    model = RetrievalTransformer(model_config, seed=config.seed)
    return _supervised(model, train_split, validation_split, config, recorder, inference, resume)
