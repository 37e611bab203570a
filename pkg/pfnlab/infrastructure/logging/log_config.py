"""
Logging configuration for pfnlab.
One handler on the `pfnlab` namespace, writing to stderr so stdout stays
free for command output.
"""
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, Optional, TextIO

from pfnlab.config.app_settings import app_settings

ROOT_LOGGER = "pfnlab"
QUIET_LIBRARIES = ("torch", "matplotlib", "urllib3", "fsspec")


def _extra_fields(record: logging.LogRecord) -> Dict[str, Any]:
    return getattr(record, "extra_fields", None) or {}


class JSONFormatter(logging.Formatter):
    """One JSON object per record; extra fields are merged at the top level."""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            "timestamp": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
            "service": app_settings.service_name,
            "environment": app_settings.environment,
        }
        if record.exc_info:
            entry["exception"] = self.formatException(record.exc_info)
        entry.update(_extra_fields(record))
        return json.dumps(entry, ensure_ascii=False, default=str)


class DevelopmentFormatter(logging.Formatter):
    """
    `time - logger - LEVEL - message | key=value | ...`, with the level
    coloured when writing to a terminal.
    """

    LEVEL_COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"

    def __init__(self, use_color: bool = False):
        super().__init__("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
        self.use_color = use_color

    def formatMessage(self, record: logging.LogRecord) -> str:
        level = record.levelname
        if self.use_color and level in self.LEVEL_COLORS:
            record.levelname = f"{self.LEVEL_COLORS[level]}{level}{self.RESET}"
        try:
            line = super().formatMessage(record)
        finally:
            record.levelname = level
        fields = _extra_fields(record)
        if fields:
            line += " | " + " | ".join(f"{key}={value}" for key, value in fields.items())
        return line


class LoggingManager:
    """
    Installs the pfnlab handler once. The level can still be changed later,
    so a `--log-level` flag parsed after import-time logger creation applies.
    """

    _instance: Optional["LoggingManager"] = None

    def __new__(cls) -> "LoggingManager":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._handler = None
        return cls._instance

    @property
    def configured(self) -> bool:
        return self._handler is not None

    def configure(self, level: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
        """
        Args:
            level: Log level name; defaults to PFNLAB_LOG_LEVEL
            stream: Handler stream on first configuration; defaults to stderr
        """
        if not self.configured:
            self._install(stream or sys.stderr)
        if level is not None:
            self.set_level(level)

    def _install(self, stream: TextIO) -> None:
        if app_settings.use_json_logs:
            formatter: logging.Formatter = JSONFormatter()
        else:
            formatter = DevelopmentFormatter(use_color=hasattr(stream, "isatty") and stream.isatty())
        handler = logging.StreamHandler(stream)
        handler.setFormatter(formatter)

        root = logging.getLogger(ROOT_LOGGER)
        root.addHandler(handler)
        root.propagate = False
        self._handler = handler
        self.set_level(app_settings.log_level)

        for name in QUIET_LIBRARIES:
            library = logging.getLogger(name)
            if library.level < logging.WARNING:
                library.setLevel(logging.WARNING)

        root.debug("Logging configured", extra={"extra_fields": {
            "environment": app_settings.environment,
            "formatter": type(formatter).__name__,
        }})

    def set_level(self, level: str) -> None:
        numeric = getattr(logging, str(level).upper(), logging.INFO)
        logging.getLogger(ROOT_LOGGER).setLevel(numeric)
        if self._handler is not None:
            self._handler.setLevel(numeric)

    def get_logger(self, name: str) -> logging.Logger:
        """Logger under the pfnlab namespace; configures the handler on first use."""
        self.configure()
        if name != ROOT_LOGGER and not name.startswith(ROOT_LOGGER + "."):
            name = f"{ROOT_LOGGER}.{name}"
        return logging.getLogger(name)


logging_manager = LoggingManager()


def get_logger(name: str) -> logging.Logger:
    """
    Example:
        get_logger("PretrainUseCase").name == "pfnlab.PretrainUseCase"
    """
    return logging_manager.get_logger(name)
