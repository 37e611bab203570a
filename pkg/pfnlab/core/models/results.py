"""
Use-case results.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from pfnlab.core.models.inference import Predictions
from pfnlab.core.models.scores import Metrics
from pfnlab.core.models.training import TrainingHistory


@dataclass
class TrainingOutcome:
    """
    `model` holds the parameters the command hands on: the final ones after
    pretraining, the best validation ones after fine-tuning or scratch training.
    """
    model: Any
    history: TrainingHistory
    steps: int
    best_step: int
    best_metric: float
    resumed_from: Optional[int] = None


@dataclass
class PredictionOutcome:
    predictions: Predictions
    decoded: List[Any]
    n_support: int

    @property
    def n_rows(self) -> int:
        return self.predictions.n_rows


@dataclass
class EvaluationOutcome:
    metrics: Metrics
    prediction: PredictionOutcome
    summary: Dict[str, Any] = field(default_factory=dict)
