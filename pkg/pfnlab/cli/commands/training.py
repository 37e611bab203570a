"""
Training subcommands: pretrain, finetune, scratch.
"""
import argparse
from typing import List

from pfnlab.adapters.mappers.config_mapper import ConfigMapper
from pfnlab.adapters.storage.run_directory import RunDirectoryRecorder
from pfnlab.cli.commands.common import (
    add_common_arguments,
    load_config,
    open_run_dir,
    require_dataset,
)
from pfnlab.cli.dependencies import DependencyContainer
from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.training import TrainRegime
from pfnlab.core.services.tabular_constraints import TabularConstraints

TRAIN_FLAGS = {
    "learning_rate": "train.learning_rate",
    "weight_decay": "train.weight_decay",
    "max_steps": "train.max_steps",
}

FINAL_CHECKPOINT = "final.ckpt"


def _add_training_arguments(parser: argparse.ArgumentParser, regime: TrainRegime) -> None:
    learning_rate, weight_decay = TabularConstraints.regime_defaults(regime.value)
    parser.add_argument(
        "--learning-rate", type=float, default=None,
        help=f"AdamW learning rate (default: {learning_rate:g})",
    )
    parser.add_argument(
        "--weight-decay", type=float, default=None,
        help=f"decoupled weight decay (default: {weight_decay:g})",
    )
    parser.add_argument("--max-steps", type=int, default=None, help="optimisation steps (default: 1000)")
    parser.add_argument("--resume", default=None, help="training checkpoint step-<N>.ckpt to continue from")


def register(subparsers) -> None:
    pretrain = subparsers.add_parser(
        "pretrain",
        help="pretrain on synthetic prior episodes",
        description="Pretrain a fresh model on episodes sampled from the synthetic classification prior.",
    )
    add_common_arguments(pretrain)
    _add_training_arguments(pretrain, TrainRegime.PRETRAIN)
    pretrain.set_defaults(handler=run_pretrain)

    finetune = subparsers.add_parser(
        "finetune",
        help="fine-tune a pretrained model on the configured dataset",
        description="Fine-tune a pretrained checkpoint with fresh support/query resplits of the training split.",
    )
    add_common_arguments(finetune)
    finetune.add_argument("--checkpoint", default=None, help="pretrained model checkpoint (required)")
    _add_training_arguments(finetune, TrainRegime.FINETUNE)
    finetune.set_defaults(handler=run_supervised, regime=TrainRegime.FINETUNE)

    scratch = subparsers.add_parser(
        "scratch",
        help="train a fresh model on the configured dataset",
        description="Train a freshly initialized model with the fine-tuning loop.",
    )
    add_common_arguments(scratch)
    _add_training_arguments(scratch, TrainRegime.SCRATCH)
    scratch.set_defaults(handler=run_supervised, regime=TrainRegime.SCRATCH, checkpoint=None)


def run_pretrain(args: argparse.Namespace, leftovers: List[str], container: DependencyContainer) -> int:
    config = load_config(args, leftovers, container, TRAIN_FLAGS)
    model_config = ConfigMapper.to_model_config(config.model, TaskKind.CLASSIFICATION)
    prior_config = ConfigMapper.to_prior_config(config.prior, config.seed)
    train_config = ConfigMapper.to_train_config(config.train, TrainRegime.PRETRAIN, config.seed)

    run_dir = open_run_dir(args, container, "pretrain", args.resume)
    run_dir.freeze_config(ConfigMapper.resolved(config, TrainRegime.PRETRAIN))
    recorder = RunDirectoryRecorder(run_dir, container.checkpoint_store, model_config.to_dict())

    outcome = container.pretrain_use_case.execute(
        model_config,
        prior_config,
        train_config,
        recorder=recorder,
        best_path=run_dir.best_checkpoint,
        final_path=run_dir.file(FINAL_CHECKPOINT),
        resume_path=args.resume,
        support_fraction=config.prior.support_fraction,
    )
    print(f"run_dir: {run_dir.path}")
    print(f"steps: {outcome.steps}  best_step: {outcome.best_step}  best_zero_shot_accuracy: {outcome.best_metric:.4f}")
    return 0


def run_supervised(args: argparse.Namespace, leftovers: List[str], container: DependencyContainer) -> int:
    regime: TrainRegime = args.regime
    config = load_config(args, leftovers, container, TRAIN_FLAGS)
    dataset = require_dataset(config, regime.value)
    source = ConfigMapper.to_dataset_source(dataset, config.seed)
    model_config = ConfigMapper.to_model_config(config.model, source.task)
    train_config = ConfigMapper.to_train_config(config.train, regime, config.seed)
    inference = ConfigMapper.to_inference_config(config.inference, config.seed)

    run_dir = open_run_dir(args, container, regime.value, args.resume)
    run_dir.freeze_config(ConfigMapper.resolved(config, regime))
    recorder = RunDirectoryRecorder(run_dir, container.checkpoint_store, model_config.to_dict())

    outcome = container.supervised_training_use_case.execute(
        source,
        model_config,
        train_config,
        inference=inference,
        recorder=recorder,
        checkpoint_path=args.checkpoint,
        best_path=run_dir.best_checkpoint,
        resume_path=args.resume,
        validation_fraction=config.train.validation_fraction,
    )
    print(f"run_dir: {run_dir.path}")
    print(f"steps: {outcome.steps}  best_step: {outcome.best_step}  best_validation_metric: {outcome.best_metric:.4f}")
    return 0
