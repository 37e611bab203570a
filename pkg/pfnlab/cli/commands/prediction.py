"""
Prediction subcommands: predict, evaluate.
"""
import argparse
from typing import List

from pfnlab.adapters.mappers.config_mapper import ConfigMapper
from pfnlab.cli.commands.common import (
    add_common_arguments,
    load_config,
    open_run_dir,
    require_checkpoint,
    require_dataset,
)
from pfnlab.cli.dependencies import DependencyContainer
from pfnlab.core.models.inference import InferenceMode
from pfnlab.core.services.tabular_constraints import TabularConstraints

INFERENCE_FLAGS = {
    "mode": "inference.mode",
    "support_budget": "inference.support_budget",
    "subset_size": "inference.subset_size",
    "n_ensembles": "inference.n_ensembles",
}

PREDICTIONS_FILE = "predictions.csv"
EVALUATION_FILE = "evaluation.yaml"


def _add_inference_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--checkpoint", default=None, help="model checkpoint (required)")
    parser.add_argument(
        "--mode", choices=[mode.value for mode in InferenceMode], default=None,
        help=f"inference mode (default: {InferenceMode.FULL_CONTEXT.value})",
    )
    parser.add_argument(
        "--support-budget", type=int, default=None,
        help=f"largest full-context support set (default: {TabularConstraints.SUPPORT_BUDGET})",
    )
    parser.add_argument(
        "--subset-size", type=int, default=None,
        help=f"ensemble member support size (default: {TabularConstraints.ENSEMBLE_SUBSET_SIZE})",
    )
    parser.add_argument(
        "--n-ensembles", type=int, default=None,
        help=f"ensemble members (default: {TabularConstraints.ENSEMBLE_MEMBERS})",
    )
    parser.add_argument("--out", default=None, help=f"predictions CSV (default: <run-dir>/{PREDICTIONS_FILE})")


def register(subparsers) -> None:
    predict = subparsers.add_parser(
        "predict",
        help="predict the test split of the configured dataset",
        description="Predict the test split with the training split as support.",
    )
    add_common_arguments(predict)
    _add_inference_arguments(predict)
    predict.set_defaults(handler=run_predict)

    evaluate = subparsers.add_parser(
        "evaluate",
        help="score test-split predictions (accuracy or R^2)",
        description=f"Predict the test split and write the score to <run-dir>/{EVALUATION_FILE}.",
    )
    add_common_arguments(evaluate)
    _add_inference_arguments(evaluate)
    evaluate.set_defaults(handler=run_evaluate)


def run_predict(args: argparse.Namespace, leftovers: List[str], container: DependencyContainer) -> int:
    config = load_config(args, leftovers, container, INFERENCE_FLAGS)
    source = ConfigMapper.to_dataset_source(require_dataset(config, "predict"), config.seed)
    inference = ConfigMapper.to_inference_config(config.inference, config.seed)
    checkpoint = require_checkpoint(args.checkpoint, "predict")

    run_dir = open_run_dir(args, container, "predict")
    run_dir.freeze_config(ConfigMapper.resolved(config))
    out_path = args.out or run_dir.file(PREDICTIONS_FILE)

    outcome = container.predict_use_case.execute(source, checkpoint, inference, out_path=out_path)
    print(f"predictions: {out_path} ({outcome.n_rows} rows, support {outcome.n_support})")
    return 0


def run_evaluate(args: argparse.Namespace, leftovers: List[str], container: DependencyContainer) -> int:
    config = load_config(args, leftovers, container, INFERENCE_FLAGS)
    source = ConfigMapper.to_dataset_source(require_dataset(config, "evaluate"), config.seed)
    inference = ConfigMapper.to_inference_config(config.inference, config.seed)
    checkpoint = require_checkpoint(args.checkpoint, "evaluate")

    run_dir = open_run_dir(args, container, "evaluate")
    run_dir.freeze_config(ConfigMapper.resolved(config))

    outcome = container.evaluate_use_case.execute(
        source,
        checkpoint,
        inference,
        summary_path=run_dir.file(EVALUATION_FILE),
        predictions_path=args.out or run_dir.file(PREDICTIONS_FILE),
    )
    print(f"{outcome.summary['metric']}: {outcome.summary['value']:.4f} (n_test={outcome.metrics.n_test})")
    return 0
