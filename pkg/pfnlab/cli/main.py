"""
pfnlab command-line entry point.
"""
import argparse
import logging
import sys
from typing import List, Optional

import torch

from pfnlab.cli.commands import bench, prediction, training
from pfnlab.cli.dependencies import DependencyContainer, get_dependency_container
from pfnlab.core.models.errors import USER_FACING_ERRORS, ConfigurationError, PfnLabError
from pfnlab.infrastructure.logging import get_logger, logging_manager

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_RUNTIME_ERROR = 2


class CommandLineParser(argparse.ArgumentParser):
    """Argument errors surface as configuration errors (exit 1)."""

    def error(self, message: str):
        raise ConfigurationError(f"{self.prog}: {message}")


def build_parser() -> CommandLineParser:
    parser = CommandLineParser(
        prog="pfnlab",
        description=(
            "Retrieval-transformer tabular learning: pretrain on a synthetic prior, fine-tune, "
            "predict and compare variants. Any config key can be overridden with --section.key=value."
        ),
        allow_abbrev=False,
    )
    parser.add_argument("--log-level", default=None, help="log level (default: PFNLAB_LOG_LEVEL or INFO)")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    training.register(subparsers)
    prediction.register(subparsers)
    bench.register(subparsers)
    return parser


def _report(error: Exception, code: int) -> int:
    message = error.message if isinstance(error, PfnLabError) else str(error)
    print(f"error: {message}", file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None, container: Optional[DependencyContainer] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 on configuration or validation errors, 2 on any
        other failure
    """
    container = container or get_dependency_container()
    try:
        args, leftovers = build_parser().parse_known_args(argv)
        logging_manager.configure(args.log_level)
        if container.settings.torch_num_threads:
            torch.set_num_threads(container.settings.torch_num_threads)
        return args.handler(args, leftovers, container)
    except USER_FACING_ERRORS as error:
        logger.debug("Command rejected", extra={"extra_fields": {"error_type": type(error).__name__}})
        return _report(error, EXIT_USER_ERROR)
    except Exception as error:
        logger.error(
            "Command failed",
            exc_info=logger.isEnabledFor(logging.DEBUG),
            extra={"extra_fields": {"error_type": type(error).__name__, "error": str(error)}},
        )
        return _report(error, EXIT_RUNTIME_ERROR)


def run() -> None:
    sys.exit(main())
