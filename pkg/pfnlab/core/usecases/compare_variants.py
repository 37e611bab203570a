"""
Variant comparison use case: every variant on every dataset, normalized
per dataset and aggregated per variant and category.
"""
import copy
import logging
from typing import Dict, Optional, Sequence

from pfnlab.core.models.dataset import Dataset, SplitSpec, TaskKind
from pfnlab.core.models.errors import ConfigurationError, InsufficientVariantsError
from pfnlab.core.models.scores import BenchDataset, ComparisonReport, ScoreTable, VariantMethod, VariantSpec
from pfnlab.core.models.training import TrainConfig
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.report_writer import ReportWriterPort
from pfnlab.core.services.inference import predict_split
from pfnlab.core.services.metrics import score_predictions
from pfnlab.core.services.retrieval_transformer import RetrievalTransformer
from pfnlab.core.services.score_normalization import comparison_rows, normalize_scores, render_table
from pfnlab.core.services.splitting import carve_validation, train_test_split
from pfnlab.core.services.tabular_constraints import TabularConstraints
from pfnlab.core.services.training_loop import finetune, train_scratch
from pfnlab.core.usecases.checkpoint_loading import CheckpointLoading
from pfnlab.infrastructure.logging import log_operation

logger = logging.getLogger(__name__)


class CompareVariantsUseCase(CheckpointLoading):
    """
    Runs (dataset, variant) cells under one seed protocol: each dataset is
    split once, every variant predicts the same test rows with the whole
    training split as support, and training variants early-stop on the same
    validation carve-out.
    """

    def __init__(self, checkpoint_store: CheckpointStorePort, report_writer: ReportWriterPort):
        self.checkpoint_store = checkpoint_store
        self.report_writer = report_writer
        self._pretrained: Dict[TaskKind, RetrievalTransformer] = {}

    def _pretrained_for(self, checkpoint_path: str, task: TaskKind) -> RetrievalTransformer:
        if task not in self._pretrained:
            self._pretrained[task] = self.load_model_for_task(checkpoint_path, task)
        return copy.deepcopy(self._pretrained[task])

    def run_cell(
        self,
        variant: VariantSpec,
        train_split: Dataset,
        test_split: Dataset,
        model_config: ModelConfig,
        train_config: Optional[TrainConfig],
        checkpoint_path: Optional[str],
        validation_fraction: float,
    ) -> float:
        """Raw test score of one variant on one dataset."""
        task = train_split.task
        if variant.trains:
            fit, validation = carve_validation(train_split, validation_fraction, train_config.seed)
        if variant.method == VariantMethod.SCRATCH:
            model, _, _ = train_scratch(
                model_config.for_task(task), fit, validation, train_config, inference=variant.inference
            )
        else:
            model = self._pretrained_for(checkpoint_path, task)
            if variant.method == VariantMethod.FINETUNE:
                model, _, _ = finetune(model, fit, validation, train_config, inference=variant.inference)

        outcome, test = predict_split(model, train_split, test_split, variant.inference)
        return score_predictions(outcome, test).value

    @log_operation("compare_variants")
    def execute(
        self,
        datasets: Sequence[BenchDataset],
        variants: Sequence[VariantSpec],
        train_configs: Dict[str, TrainConfig],
        model_config: ModelConfig,
        checkpoint_path: Optional[str] = None,
        split: SplitSpec = SplitSpec(),
        validation_fraction: float = TabularConstraints.DEFAULT_VALIDATION_FRACTION,
        output_dir: Optional[str] = None,
    ) -> ComparisonReport:
        """
        Args:
            datasets: Benchmark datasets with stable ids
            variants: Compared variants, at least two
            train_configs: Training settings per training variant name
            model_config: Model shape for scratch variants without a checkpoint
            checkpoint_path: Pretrained model for ICL and fine-tune variants
            split: Train/test protocol for datasets without their own
            validation_fraction: Early-stopping carve-out of each training split
            output_dir: Where report.csv, report.txt and aggregate.csv go

        Returns:
            Normalized score table and its rendered form

        Raises:
            InsufficientVariantsError: With fewer than two variants. A failed
                cell is logged and scored None; a dataset left with fewer
                than two finite scores stays unnormalized
            ConfigurationError: If a pretrained variant has no checkpoint
        """
        if len(variants) < 2:
            raise InsufficientVariantsError(f"Comparison needs at least 2 variants, got {len(variants)}")
        if checkpoint_path is None and any(variant.pretrained for variant in variants):
            raise ConfigurationError("ICL and fine-tune variants need a pretrained checkpoint")
        missing = [v.name for v in variants if v.trains and v.name not in train_configs]
        if missing:
            raise ConfigurationError(f"No training settings for variants {missing}")
        if checkpoint_path is not None:
            model_config = self.checkpoint_store.read_model_config(checkpoint_path)
        self._pretrained = {}

        raw = ScoreTable()
        for bench_dataset in datasets:
            train_split, test_split = train_test_split(bench_dataset.dataset, bench_dataset.split or split)
            for variant in variants:
                try:
                    score: Optional[float] = self.run_cell(
                        variant,
                        train_split,
                        test_split,
                        model_config,
                        train_configs.get(variant.name),
                        checkpoint_path,
                        validation_fraction,
                    )
                except Exception as error:
                    logger.warning(
                        "Variant failed on dataset",
                        extra={"extra_fields": {
                            "dataset": bench_dataset.dataset_id,
                            "variant": variant.name,
                            "error_type": type(error).__name__,
                            "error": str(error),
                        }},
                    )
                    score = None
                raw.add(bench_dataset.dataset_id, variant.name, bench_dataset.category, score)
                logger.info(
                    "Scored cell",
                    extra={"extra_fields": {
                        "dataset": bench_dataset.dataset_id,
                        "variant": variant.name,
                        "score": score,
                    }},
                )

        table = normalize_scores(raw, strict=False)
        report = ComparisonReport(
            table=table,
            rendered=render_table(comparison_rows(table, variants)),
            variants=tuple(variants),
        )
        if output_dir is not None:
            self.report_writer.write_comparison(report, output_dir)
        return report

