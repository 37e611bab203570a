"""
Dependency injection configuration for pfnlab.
Wires adapters into the use cases for the command-line entry point.
"""
from functools import lru_cache

from pfnlab.config.app_settings import AppSettings, app_settings

# Domain ports
from pfnlab.core.ports.checkpoint_store import CheckpointStorePort
from pfnlab.core.ports.dataset_repository import DatasetRepositoryPort
from pfnlab.core.ports.report_writer import ReportWriterPort

# Domain use cases
from pfnlab.core.usecases.compare_variants import CompareVariantsUseCase
from pfnlab.core.usecases.dump_prior import DumpPriorUseCase
from pfnlab.core.usecases.prediction import EvaluateUseCase, PredictUseCase
from pfnlab.core.usecases.pretrain import PretrainUseCase
from pfnlab.core.usecases.supervised_training import SupervisedTrainingUseCase

# Infrastructure adapters
from pfnlab.adapters.reporting.report_writer import FileReportWriter
from pfnlab.adapters.repositories.csv_dataset_repository import CsvDatasetRepository
from pfnlab.adapters.repositories.yaml_config_repository import YamlConfigRepository
from pfnlab.adapters.storage.torch_checkpoint_store import TorchCheckpointStore


class DependencyContainer:
    """
    Lazily built singletons for one process.
    """

    def __init__(self, settings: AppSettings = None):
        self._settings = settings
        self._dataset_repository = None
        self._config_repository = None
        self._checkpoint_store = None
        self._report_writer = None
        self._pretrain_use_case = None
        self._supervised_training_use_case = None
        self._predict_use_case = None
        self._evaluate_use_case = None
        self._compare_variants_use_case = None
        self._dump_prior_use_case = None

    @property
    def settings(self) -> AppSettings:
        if self._settings is None:
            self._settings = app_settings
        return self._settings

    # INFRASTRUCTURE LAYER
    @property
    def dataset_repository(self) -> DatasetRepositoryPort:
        if self._dataset_repository is None:
            self._dataset_repository = CsvDatasetRepository()
        return self._dataset_repository

    @property
    def config_repository(self) -> YamlConfigRepository:
        if self._config_repository is None:
            self._config_repository = YamlConfigRepository()
        return self._config_repository

    @property
    def checkpoint_store(self) -> CheckpointStorePort:
        if self._checkpoint_store is None:
            self._checkpoint_store = TorchCheckpointStore()
        return self._checkpoint_store

    @property
    def report_writer(self) -> ReportWriterPort:
        if self._report_writer is None:
            self._report_writer = FileReportWriter()
        return self._report_writer

    # APPLICATION LAYER (Use cases)
    @property
    def pretrain_use_case(self) -> PretrainUseCase:
        if self._pretrain_use_case is None:
            self._pretrain_use_case = PretrainUseCase(checkpoint_store=self.checkpoint_store)
        return self._pretrain_use_case

    @property
    def supervised_training_use_case(self) -> SupervisedTrainingUseCase:
        if self._supervised_training_use_case is None:
            self._supervised_training_use_case = SupervisedTrainingUseCase(
                dataset_repository=self.dataset_repository,
                checkpoint_store=self.checkpoint_store,
            )
        return self._supervised_training_use_case

    @property
    def predict_use_case(self) -> PredictUseCase:
        if self._predict_use_case is None:
            self._predict_use_case = PredictUseCase(
                dataset_repository=self.dataset_repository,
                checkpoint_store=self.checkpoint_store,
                report_writer=self.report_writer,
            )
        return self._predict_use_case

    @property
    def evaluate_use_case(self) -> EvaluateUseCase:
        if self._evaluate_use_case is None:
            self._evaluate_use_case = EvaluateUseCase(
                predict_use_case=self.predict_use_case,
                report_writer=self.report_writer,
            )
        return self._evaluate_use_case

    @property
    def compare_variants_use_case(self) -> CompareVariantsUseCase:
        if self._compare_variants_use_case is None:
            self._compare_variants_use_case = CompareVariantsUseCase(
                checkpoint_store=self.checkpoint_store,
                report_writer=self.report_writer,
            )
        return self._compare_variants_use_case

    @property
    def dump_prior_use_case(self) -> DumpPriorUseCase:
        if self._dump_prior_use_case is None:
            self._dump_prior_use_case = DumpPriorUseCase(dataset_repository=self.dataset_repository)
        return self._dump_prior_use_case

    # TESTING SUPPORT
    def override_settings(self, settings: AppSettings) -> None:
        """Override process settings (for testing)."""
        self._settings = settings

    def override_dataset_repository(self, repository: DatasetRepositoryPort) -> None:
        """Override dataset repository (for testing)."""
        self._dataset_repository = repository
        # Reset dependent use cases
        self._supervised_training_use_case = None
        self._predict_use_case = None
        self._evaluate_use_case = None
        self._dump_prior_use_case = None

    def override_checkpoint_store(self, store: CheckpointStorePort) -> None:
        """Override checkpoint store (for testing)."""
        self._checkpoint_store = store
        # Reset dependent use cases
        self._pretrain_use_case = None
        self._supervised_training_use_case = None
        self._predict_use_case = None
        self._evaluate_use_case = None
        self._compare_variants_use_case = None


# GLOBAL CONTAINER INSTANCE
@lru_cache()
def get_dependency_container() -> DependencyContainer:
    """Get global dependency container (singleton)."""
    return DependencyContainer()
