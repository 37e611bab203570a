"""
Checkpoint handling shared by the use cases.
"""
import logging
from typing import Any, Dict, Optional

from pfnlab.core.models.dataset import TaskKind
from pfnlab.core.models.errors import CheckpointMismatchError
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.training_recorder import TrainingRecorderPort
from pfnlab.core.services.retrieval_transformer import RetrievalTransformer, transfer_body

logger = logging.getLogger(__name__)


class CheckpointLoading:
    """Mixin for use cases that read model checkpoints or resume runs."""

    checkpoint_store: CheckpointStorePort

    def load_model_for_task(
        self,
        path: str,
        task: TaskKind,
        expected: Optional[ModelConfig] = None,
        transfer_head: bool = True,
    ) -> RetrievalTransformer:
        """
        Load a checkpoint for `task`. A checkpoint trained for the other task
        keeps its body and gets a fresh zero head when `transfer_head` is set.

        Raises:
            CheckpointMismatchError: On a config or tensor mismatch, or on a
                task mismatch without `transfer_head`
        """
        model = self.checkpoint_store.load_model(path, expected, ignore_task=True)
        if model.config.task == task:
            return model
        if not transfer_head:
            raise CheckpointMismatchError("task", task.value, model.config.task.value)

        target = RetrievalTransformer(model.config.for_task(task))
        transfer_body(target, model.state_dict())
        logger.info(
            "Transferred body to a fresh head",
            extra={"extra_fields": {"from_task": model.config.task.value, "to_task": task.value}},
        )
        return target

    def load_resume(
        self,
        path: Optional[str],
        model_config: ModelConfig,
        recorder: Optional[TrainingRecorderPort],
    ) -> Optional[Dict[str, Any]]:
        """
        Read a training checkpoint and tell the recorder where the run picks up.

        Raises:
            CheckpointMismatchError: If the run was made with another model config
        """
        if path is None:
            return None
        payload = self.checkpoint_store.load_train_state(path)
        stored = payload.get("model_config")
        if stored is not None:
            found = ModelConfig.from_dict(stored)
            difference = model_config.first_difference(found)
            if difference is not None:
                raise CheckpointMismatchError(
                    difference, getattr(model_config, difference), getattr(found, difference)
                )
        if recorder is not None:
            recorder.resume(int(payload["step"]))
        return payload
