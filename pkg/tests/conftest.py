"""
Shared test configuration and fixtures for pfnlab tests.
"""
import sys
from pathlib import Path

import pytest

# Setup Python path once for all tests
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

# Import after path setup
from pfnlab.cli.dependencies import DependencyContainer
from pfnlab.config.app_settings import AppSettings
from pfnlab.core.models.training import PriorConfig
from pfnlab.infrastructure.logging import logging_manager

# Test helpers
from tests.utils.mock_helpers import MockHelpers
from tests.utils.tabular_helpers import SMALL_PRIOR, TabularTestHelpers


# ENVIRONMENT & CONFIGURATION FIXTURES

@pytest.fixture(scope="session", autouse=True)
def configure_test_logging():
    """Configure the pfnlab logger once, quietly, against the session's stderr."""
    logging_manager.configure("WARNING")


@pytest.fixture
def runs_root(tmp_path) -> Path:
    return tmp_path / "runs"


@pytest.fixture
def test_settings(monkeypatch, runs_root) -> AppSettings:
    """AppSettings built from a test environment, without a seed override."""
    for key, value in MockHelpers.create_test_environment_config(str(runs_root)).items():
        monkeypatch.setenv(key, value)
    monkeypatch.delenv("PFNLAB_SEED", raising=False)
    monkeypatch.delenv("PFNLAB_TORCH_NUM_THREADS", raising=False)
    return AppSettings()


@pytest.fixture
def container(test_settings) -> DependencyContainer:
    """Fresh dependency container wired to the test settings."""
    return DependencyContainer(settings=test_settings)


# MOCK FIXTURES (for unit tests)

@pytest.fixture
def mock_checkpoint_store():
    return MockHelpers.create_mock_checkpoint_store()


@pytest.fixture
def mock_report_writer():
    return MockHelpers.create_mock_report_writer()


@pytest.fixture
def mock_dataset_repository():
    return MockHelpers.create_mock_dataset_repository()


# TEST DATA FIXTURES

@pytest.fixture
def small_model_config():
    return TabularTestHelpers.small_model_config()


@pytest.fixture
def small_prior_config() -> PriorConfig:
    values = dict(SMALL_PRIOR)
    for key in ("feature_count_range", "class_count_range", "latent_width_range", "mixture_components_range"):
        values[key] = tuple(values[key])
    return PriorConfig(**values)


@pytest.fixture
def blob_dataset():
    return TabularTestHelpers.blob_dataset()


@pytest.fixture
def blob_csv(tmp_path, blob_dataset) -> str:
    """The blob dataset written as data/blobs.csv."""
    return TabularTestHelpers.write_dataset_csv(str(tmp_path / "data" / "blobs.csv"), blob_dataset)
