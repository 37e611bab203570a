from .csv_dataset_repository import CsvDatasetRepository
from .yaml_config_repository import YamlConfigRepository

__all__ = ["CsvDatasetRepository", "YamlConfigRepository"]
