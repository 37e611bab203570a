"""
Run directories and the recorder that writes training artifacts into them.
"""
import logging
import os
from datetime import datetime
from typing import Any, Dict, Optional

import yaml

from pfnlab.core.models.errors import ConfigurationError
from pfnlab.core.models.training import StepRecord
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.training_recorder import TrainingRecorderPort
from pfnlab.core.services.optimizer import TrainState

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.yaml"
METRICS_FILE = "metrics.log"
BEST_CHECKPOINT = "best.ckpt"


class RunDirectory:
    """One command's output directory. Existing runs are never overwritten."""

    def __init__(self, path: str):
        self.path = path

    @classmethod
    def create(cls, runs_root: str, command: str, explicit: Optional[str] = None, resume: bool = False) -> "RunDirectory":
        """
        Args:
            runs_root: Parent of timestamped run directories
            command: Subcommand name, used as the directory prefix
            explicit: Directory requested on the command line
            resume: Allow reusing an existing directory

        Raises:
            ConfigurationError: If `explicit` already holds a run and `resume` is off
        """
        if explicit is not None:
            if os.path.exists(os.path.join(explicit, CONFIG_FILE)) and not resume:
                raise ConfigurationError(
                    f"Run directory {explicit} already holds a run; choose another --run-dir",
                    run_dir=explicit,
                )
            os.makedirs(explicit, exist_ok=True)
            return cls(explicit)

        stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
        base = os.path.join(runs_root, f"{command}-{stamp}")
        path, suffix = base, 1
        while os.path.exists(path):
            path = f"{base}-{suffix}"
            suffix += 1
        os.makedirs(path)
        return cls(path)

    @property
    def config_path(self) -> str:
        return os.path.join(self.path, CONFIG_FILE)

    @property
    def metrics_path(self) -> str:
        return os.path.join(self.path, METRICS_FILE)

    @property
    def best_checkpoint(self) -> str:
        return os.path.join(self.path, BEST_CHECKPOINT)

    def step_checkpoint(self, step: int) -> str:
        return os.path.join(self.path, f"step-{step}.ckpt")

    def file(self, name: str) -> str:
        return os.path.join(self.path, name)

    def freeze_config(self, resolved: Dict[str, Any]) -> str:
        with open(self.config_path, "w", encoding="utf-8") as handle:
            yaml.safe_dump(resolved, handle, sort_keys=False)
        return self.config_path


class RunDirectoryRecorder(TrainingRecorderPort):
    """
    Writes the metrics log line by line, `step-<N>.ckpt` on every evaluation
    and `best.ckpt` on every improvement.
    """

    def __init__(self, run_dir: RunDirectory, checkpoint_store: CheckpointStorePort, model_config: Dict[str, Any]):
        self.run_dir = run_dir
        self.checkpoint_store = checkpoint_store
        self.model_config = model_config

    def resume(self, step: int) -> None:
        """Drop log lines after `step` so the resumed run continues the same log."""
        if not os.path.exists(self.run_dir.metrics_path):
            return
        with open(self.run_dir.metrics_path, encoding="utf-8") as handle:
            lines = [line for line in handle if int(line.split("\t", 1)[0]) <= step]
        with open(self.run_dir.metrics_path, "w", encoding="utf-8") as handle:
            handle.writelines(lines)

    def record_step(self, record: StepRecord) -> None:
        with open(self.run_dir.metrics_path, "a", encoding="utf-8") as handle:
            handle.write(record.to_log_line() + "\n")

    def checkpoint(self, state: TrainState) -> None:
        path = self.run_dir.step_checkpoint(state.step)
        self.checkpoint_store.save_train_state({"model_config": self.model_config, **state.state_dict()}, path)
        logger.debug("Wrote training checkpoint", extra={"extra_fields": {"path": path}})

    def record_best(self, state: TrainState) -> None:
        self.checkpoint_store.save_model(state.model, self.run_dir.best_checkpoint, params=state.best_params)
