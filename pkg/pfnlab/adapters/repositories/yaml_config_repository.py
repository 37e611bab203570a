"""
Experiment config loading: YAML file, environment seed and dotted
command-line overrides, validated by the strict schema.
"""
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import yaml
from pydantic import ValidationError

from pfnlab.core.models.errors import ConfigurationError
from pfnlab.schemas.experiment import ExperimentConfig

logger = logging.getLogger(__name__)


def parse_override(argument: str) -> tuple:
    """
    '--train.learning_rate=1e-5' -> (['train', 'learning_rate'], 1e-05).
    Values are parsed as YAML scalars.

    Raises:
        ConfigurationError: If the argument is not of the form --key.path=value
    """
    if not argument.startswith("--") or "=" not in argument:
        raise ConfigurationError(f"Unrecognized argument {argument!r}; overrides look like --section.key=value")
    key, raw_value = argument[2:].split("=", 1)
    path = [part for part in key.split(".") if part]
    if not path:
        raise ConfigurationError(f"Empty override key in {argument!r}")
    try:
        value = yaml.safe_load(raw_value)
    except yaml.YAMLError as error:
        raise ConfigurationError(f"Cannot parse override value {raw_value!r}: {error}") from error
    return path, value


def apply_overrides(raw: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    for argument in overrides:
        path, value = parse_override(argument)
        node = raw
        for part in path[:-1]:
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            elif not isinstance(child, dict):
                raise ConfigurationError(f"Override {argument!r} descends into non-section {part!r}")
            node = child
        node[path[-1]] = value
    return raw


def describe_validation_error(error: ValidationError) -> str:
    """One line per problem, each naming its dotted key."""
    lines = []
    for problem in error.errors():
        key = ".".join(str(part) for part in problem["loc"]) or "<root>"
        if problem["type"] == "extra_forbidden":
            lines.append(f"unknown configuration key '{key}'")
        else:
            lines.append(f"invalid value for '{key}': {problem['msg']}")
    return "; ".join(lines)


class YamlConfigRepository:
    """Reads experiment configs."""

    def load(
        self,
        path: str,
        overrides: Sequence[str] = (),
        seed_override: Optional[int] = None,
    ) -> ExperimentConfig:
        """
        Precedence: file < environment seed < command-line overrides.

        Raises:
            ConfigurationError: On a missing file, bad YAML or schema violations
        """
        if not os.path.isfile(path):
            raise ConfigurationError(f"Config file not found: {path}", path=path)
        try:
            with open(path, encoding="utf-8") as handle:
                raw = yaml.safe_load(handle) or {}
        except yaml.YAMLError as error:
            raise ConfigurationError(f"Cannot parse {path}: {error}") from error
        if not isinstance(raw, dict):
            raise ConfigurationError(f"{path} must contain a mapping at the top level")

        if seed_override is not None:
            raw["seed"] = seed_override
        raw = apply_overrides(raw, overrides)
        return self.validate(raw)

    @staticmethod
    def validate(raw: Dict[str, Any]) -> ExperimentConfig:
        try:
            return ExperimentConfig.model_validate(raw)
        except ValidationError as error:
            raise ConfigurationError(describe_validation_error(error)) from error

    @staticmethod
    def overrides_from(arguments: List[str]) -> List[str]:
        """Validate leftover command-line arguments as overrides."""
        for argument in arguments:
            parse_override(argument)
        return list(arguments)
