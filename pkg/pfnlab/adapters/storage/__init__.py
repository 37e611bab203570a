from .in_memory_recorder import InMemoryRecorder
from .run_directory import RunDirectory, RunDirectoryRecorder
from .torch_checkpoint_store import TorchCheckpointStore

__all__ = ["InMemoryRecorder", "RunDirectory", "RunDirectoryRecorder", "TorchCheckpointStore"]
