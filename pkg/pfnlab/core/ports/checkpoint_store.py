"""
Checkpoint store port.
Defines the interface for persisting model parameters and full training state.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from pfnlab.core.models.transformer import ModelConfig
from pfnlab.core.services.retrieval_transformer import RetrievalTransformer


class CheckpointStorePort(ABC):
    """
    Port for checkpoint persistence.
    Model checkpoints hold the config and named tensors; training-state
    checkpoints additionally hold optimizer, schedule, rng and early-stop state.
    """

    @abstractmethod
    def save_model(self, model: RetrievalTransformer, path: str, params: Optional[Dict[str, Any]] = None) -> None:
        """
        Write a model checkpoint.

        Args:
            model: Model whose config is recorded
            path: Destination file
            params: Tensors to write instead of the model's current ones
        """
        pass

    @abstractmethod
    def load_model(
        self,
        path: str,
        expected: Optional[ModelConfig] = None,
        ignore_task: bool = False,
    ) -> RetrievalTransformer:
        """
        Read a model checkpoint, validating every tensor shape.
        With `ignore_task` the stored task may differ from `expected.task`.

        Raises:
            CheckpointMismatchError: If the stored config or a tensor disagrees
                with `expected`
        """
        pass

    @abstractmethod
    def read_model_config(self, path: str) -> ModelConfig:
        """Config stored in a model checkpoint."""
        pass

    @abstractmethod
    def save_train_state(self, state: Dict[str, Any], path: str) -> None:
        pass

    @abstractmethod
    def load_train_state(self, path: str) -> Dict[str, Any]:
        pass
