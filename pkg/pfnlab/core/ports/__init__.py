from .checkpoint_store import CheckpointStorePort
from .dataset_repository import DatasetRepositoryPort
from .report_writer import ReportWriterPort
from .training_recorder import TrainingRecorderPort

__all__ = [
    "CheckpointStorePort",
    "DatasetRepositoryPort",
    "ReportWriterPort",
    "TrainingRecorderPort",
]
