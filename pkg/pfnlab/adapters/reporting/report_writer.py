"""
File report writer: comparison reports, prediction files and evaluation summaries.
"""
import logging
import os
from typing import Any, Dict, List, Optional

import pandas as pd
import yaml

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.inference import Predictions
from pfnlab.core.models.scores import ComparisonReport
from pfnlab.core.ports.report_writer import ReportWriterPort

logger = logging.getLogger(__name__)

REPORT_CSV = "report.csv"
REPORT_TXT = "report.txt"
AGGREGATE_CSV = "aggregate.csv"


def _ensure_parent(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


class FileReportWriter(ReportWriterPort):

    def write_comparison(self, report: ComparisonReport, directory: str) -> List[str]:
        """
        Writes report.csv (dataset, variant, category, raw, normalized),
        report.txt (aligned table) and aggregate.csv (variant, category, score).
        """
        os.makedirs(directory, exist_ok=True)
        cells = pd.DataFrame(
            [
                {
                    "dataset": entry.dataset_id,
                    "variant": entry.variant_id,
                    "category": entry.category,
                    "raw": entry.raw,
                    "normalized": entry.normalized,
                }
                for entry in report.table.entries
            ],
            columns=["dataset", "variant", "category", "raw", "normalized"],
        )
        aggregates = pd.DataFrame(
            [
                {"variant": variant, "category": category, "score": score}
                for (variant, category), score in sorted(report.table.aggregates.items())
            ],
            columns=["variant", "category", "score"],
        )

        paths = [os.path.join(directory, name) for name in (REPORT_CSV, REPORT_TXT, AGGREGATE_CSV)]
        cells.to_csv(paths[0], index=False, na_rep="NA")
        with open(paths[1], "w", encoding="utf-8") as handle:
            handle.write(report.rendered)
        aggregates.to_csv(paths[2], index=False)
        logger.info("Wrote comparison report", extra={"extra_fields": {"directory": directory}})
        return paths

    def write_predictions(
        self,
        predictions: Predictions,
        path: str,
        decoded: Optional[List[Any]] = None,
    ) -> None:
        """
        One row per test observation: `pred` then `p_0..p_{K-1}` for
        classification, `pred` alone for regression.
        """
        _ensure_parent(path)
        if predictions.task == TaskKind.CLASSIFICATION:
            pred = decoded if decoded is not None else predictions.class_indices.tolist()
            frame = pd.DataFrame({"pred": pred})
            for k in range(predictions.probabilities.shape[1]):
                frame[f"p_{k}"] = predictions.probabilities[:, k]
        else:
            frame = pd.DataFrame({"pred": decoded if decoded is not None else predictions.values})
        frame.to_csv(path, index=False)
        logger.info("Wrote predictions", extra={"extra_fields": {"path": path, "rows": len(frame)}})

    def write_evaluation(self, summary: Dict[str, Any], path: str) -> None:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8") as handle:
            yaml.safe_dump(summary, handle, sort_keys=False)
