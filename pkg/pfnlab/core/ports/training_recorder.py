"""
Training recorder port.
Receives per-step records and checkpoint events from the training loops.
"""
from abc import ABC, abstractmethod

from pfnlab.core.models.training import StepRecord
from pfnlab.core.services.optimizer import TrainState


class TrainingRecorderPort(ABC):
    @abstractmethod
    def record_step(self, record: StepRecord) -> None:
        """Called once per optimisation step, in step order."""
        pass

    @abstractmethod
    def checkpoint(self, state: TrainState) -> None:
        """Called on every evaluation step with the current training state."""
        pass

    @abstractmethod
    def record_best(self, state: TrainState) -> None:
        """Called whenever the validation metric strictly improves."""
        pass

    @abstractmethod
    def resume(self, step: int) -> None:
        """Called once before a run restored at `step` continues."""
        pass
