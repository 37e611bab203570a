"""
In-memory training recorder for tests and benchmark cells that keep no files.
"""
import copy
from typing import Any, Dict, List

from pfnlab.core.models.training import StepRecord
from pfnlab.core.ports.training_recorder import TrainingRecorderPort
from pfnlab.core.services.optimizer import TrainState


class InMemoryRecorder(TrainingRecorderPort):
    def __init__(self, keep_states: bool = False):
        self.keep_states = keep_states
        self.records: List[StepRecord] = []
        self.checkpoint_steps: List[int] = []
        self.best_steps: List[int] = []
        self.states: Dict[int, Dict[str, Any]] = {}

    def record_step(self, record: StepRecord) -> None:
        self.records.append(record)

    def checkpoint(self, state: TrainState) -> None:
        self.checkpoint_steps.append(state.step)
        if self.keep_states:
            self.states[state.step] = copy.deepcopy(state.state_dict())

    def record_best(self, state: TrainState) -> None:
        self.best_steps.append(state.step)

    @property
    def log_lines(self) -> List[str]:
        return [record.to_log_line() for record in self.records]

    def resume(self, step: int) -> None:
        self.records = [record for record in self.records if record.step <= step]
