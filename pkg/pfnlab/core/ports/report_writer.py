"""
Report writer port.
Persists benchmark score tables and predictions.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from pfnlab.core.models.inference import Predictions
from pfnlab.core.models.scores import ComparisonReport


class ReportWriterPort(ABC):
    @abstractmethod
    def write_comparison(self, report: ComparisonReport, directory: str) -> List[str]:
        """Write the comparison report files; returns the written paths."""
        pass

    @abstractmethod
    def write_predictions(
        self,
        predictions: Predictions,
        path: str,
        decoded: Optional[List[Any]] = None,
    ) -> None:
        """
        Write one row per test observation.

        Args:
            predictions: Model outputs
            path: Destination CSV
            decoded: Predictions on the original label or target scale
        """
        pass

    @abstractmethod
    def write_evaluation(self, summary: Dict[str, Any], path: str) -> None:
        pass
