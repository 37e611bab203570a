"""
Checkpoint store backed by torch serialization.
"""
import logging
import os
from typing import Any, Dict, Optional

import torch

from pfnlab.core.models.errors import CheckpointMismatchError, ConfigurationError
from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.services.retrieval_transformer import RetrievalTransformer

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class TorchCheckpointStore(CheckpointStorePort):
    """
    Model checkpoints are dicts with `format_version`, `model_config`,
    `shapes` and `tensors`; loading goes through `torch.load(weights_only=True)`.
    """

    def _read(self, path: str) -> Dict[str, Any]:
        if not os.path.isfile(path):
            raise ConfigurationError(f"Checkpoint not found: {path}", path=path)
        return torch.load(path, map_location="cpu", weights_only=True)

    @staticmethod
    def _write(payload: Dict[str, Any], path: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        torch.save(payload, path)

    def save_model(self, model: RetrievalTransformer, path: str, params: Optional[Dict[str, Any]] = None) -> None:
        tensors = params if params is not None else model.state_dict()
        payload = {
            "format_version": FORMAT_VERSION,
            "model_config": model.config.to_dict(),
            "shapes": {name: list(tensor.shape) for name, tensor in tensors.items()},
            "tensors": {name: tensor.detach().clone() for name, tensor in tensors.items()},
        }
        self._write(payload, path)
        logger.debug("Saved model checkpoint", extra={"extra_fields": {"path": path}})

    def read_model_config(self, path: str) -> ModelConfig:
        payload = self._read(path)
        self._check_version(payload)
        return ModelConfig.from_dict(payload["model_config"])

    def load_model(
        self,
        path: str,
        expected: Optional[ModelConfig] = None,
        ignore_task: bool = False,
    ) -> RetrievalTransformer:
        """
        Args:
            path: Checkpoint file
            expected: Config the checkpoint must match
            ignore_task: Accept a checkpoint trained for another task

        Raises:
            CheckpointMismatchError: On the first disagreeing config field or tensor
        """
        payload = self._read(path)
        self._check_version(payload)
        config = ModelConfig.from_dict(payload["model_config"])
        if expected is not None:
            difference = expected.first_difference(config, skip=("task",) if ignore_task else ())
            if difference is not None:
                raise CheckpointMismatchError(
                    difference, getattr(expected, difference), getattr(config, difference)
                )

        model = RetrievalTransformer(config)
        shapes = model.parameter_shapes()
        tensors = payload["tensors"]
        for name, shape in shapes.items():
            if name not in tensors:
                raise CheckpointMismatchError(name, shape, None)
            found = tuple(tensors[name].shape)
            if found != shape or tuple(payload["shapes"].get(name, ())) != shape:
                raise CheckpointMismatchError(name, shape, found)
        extra = sorted(set(tensors) - set(shapes))
        if extra:
            raise CheckpointMismatchError(extra[0], None, tuple(tensors[extra[0]].shape))

        model.load_state_dict(tensors)
        logger.info("Loaded model checkpoint", extra={"extra_fields": {"path": path, "task": config.task.value}})
        return model

    @staticmethod
    def _check_version(payload: Dict[str, Any]) -> None:
        version = payload.get("format_version")
        if version != FORMAT_VERSION:
            raise CheckpointMismatchError("format_version", FORMAT_VERSION, version)

    def save_train_state(self, state: Dict[str, Any], path: str) -> None:
        self._write({"format_version": FORMAT_VERSION, **state}, path)

    def load_train_state(self, path: str) -> Dict[str, Any]:
        payload = self._read(path)
        self._check_version(payload)
        return payload
