"""
Helpers shared by the subcommands: config loading, run directories and
the arguments every subcommand accepts.
"""
import argparse
import os
from typing import Dict, List, Optional

from pfnlab.adapters.storage.run_directory import RunDirectory
from pfnlab.cli.dependencies import DependencyContainer
from pfnlab.core.models.errors import ConfigurationError
from pfnlab.schemas.experiment import DatasetSection, ExperimentConfig


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="experiment config file (YAML)")
    parser.add_argument(
        "--run-dir",
        default=None,
        help="output directory (default: a new timestamped directory under PFNLAB_RUNS_ROOT)",
    )


def flag_overrides(args: argparse.Namespace, mapping: Dict[str, str]) -> List[str]:
    """Dotted overrides for the convenience flags that were given."""
    overrides = []
    for attribute, key in mapping.items():
        value = getattr(args, attribute, None)
        if value is not None:
            overrides.append(f"--{key}={value}")
    return overrides


def load_config(
    args: argparse.Namespace,
    leftovers: List[str],
    container: DependencyContainer,
    flags: Optional[Dict[str, str]] = None,
) -> ExperimentConfig:
    """
    The experiment config with, in increasing precedence, PFNLAB_SEED,
    dotted `--section.key=value` overrides and the named flags.
    """
    repository = container.config_repository
    overrides = repository.overrides_from(leftovers) + flag_overrides(args, flags or {})
    return repository.load(args.config, overrides, seed_override=container.settings.seed)


def require_dataset(config: ExperimentConfig, command: str) -> DatasetSection:
    if config.dataset is None:
        raise ConfigurationError(f"'{command}' needs a dataset section in the config")
    return config.dataset


def require_checkpoint(path: Optional[str], command: str) -> str:
    if path is None:
        raise ConfigurationError(f"'{command}' needs --checkpoint")
    return path


def open_run_dir(
    args: argparse.Namespace,
    container: DependencyContainer,
    command: str,
    resume: Optional[str] = None,
) -> RunDirectory:
    """A resumed run continues in the directory of its checkpoint unless --run-dir says otherwise."""
    explicit = args.run_dir
    if explicit is None and resume is not None:
        explicit = os.path.dirname(os.path.abspath(resume))
    return RunDirectory.create(container.settings.runs_root, command, explicit, resume=resume is not None)
