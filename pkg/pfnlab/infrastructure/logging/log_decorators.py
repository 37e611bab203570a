"""
Operation logging decorators for pfnlab.
Structured start / completion / failure records for use-case execution.
"""
import functools
import inspect
import logging
import time
import traceback
import uuid
from datetime import datetime, timezone
from typing import Any, Callable, Dict

import numpy as np
import torch

from pfnlab.config.app_settings import app_settings
from pfnlab.core.models.errors import USER_FACING_ERRORS, PfnLabError
from .log_config import get_logger

MAX_LOGGED_ITEMS = 8
SLOW_OPERATION_MS = 60_000


def _summarize(data: Any) -> Any:
    """
    Make a value safe to log.
    Arrays and tensors become shape/dtype descriptors, long sequences are
    truncated and objects with a summary-friendly `n_rows` report it.
    """
    if isinstance(data, np.ndarray):
        return f"ndarray(shape={data.shape}, dtype={data.dtype})"
    if isinstance(data, torch.Tensor):
        return f"tensor(shape={tuple(data.shape)}, dtype={data.dtype})"
    if isinstance(data, dict):
        return {key: _summarize(value) for key, value in list(data.items())[:MAX_LOGGED_ITEMS]}
    if isinstance(data, (list, tuple)):
        items = [_summarize(item) for item in data[:MAX_LOGGED_ITEMS]]
        if len(data) > MAX_LOGGED_ITEMS:
            items.append(f"... {len(data) - MAX_LOGGED_ITEMS} more")
        return items
    if isinstance(data, (str, int, float, bool)) or data is None:
        return data
    if hasattr(data, "n_rows"):
        return f"{type(data).__name__}(n_rows={data.n_rows})"
    return type(data).__name__


def _operation_context(operation: str, method_name: str, component_name: str) -> Dict[str, Any]:
    return {
        "component": component_name,
        "operation": operation,
        "method": method_name,
        "started_at": datetime.now(timezone.utc).isoformat(),
        "operation_id": f"op_{uuid.uuid4().hex[:8]}",
    }


def _failure_context(error: Exception) -> Dict[str, Any]:
    """
    Rejections (bad config, bad data) are expected outcomes and carry their
    own coordinates; anything else gets a stack trace in development.
    """
    fields: Dict[str, Any] = {"status": "failed", "error_type": type(error).__name__}
    if isinstance(error, PfnLabError):
        fields["error_message"] = error.message
        fields["error_context"] = _summarize(error.context)
    else:
        fields["error_message"] = str(error)
    if app_settings.is_development and not isinstance(error, USER_FACING_ERRORS):
        fields["stack_trace"] = traceback.format_exc()
    return fields


def log_operation(
    operation: str,
    level: str = "INFO",
    include_args: bool = False,
    include_result: bool = True,
    include_performance: bool = True,
) -> Callable:
    """
    Decorator for use-case methods.

    Args:
        operation: Operation name
        level: Logging level
        include_args: Whether to log (summarized) arguments
        include_result: Whether to log the (summarized) result
        include_performance: Whether to log timing metrics

    Returns:
        Decorated method with automatic structured logging
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(self, *args, **kwargs):
            component_name = self.__class__.__name__
            logger = get_logger(f"{func.__module__}.{component_name}")
            context = _operation_context(operation, func.__name__, component_name)

            if include_args:
                bound_args = inspect.signature(func).bind(self, *args, **kwargs)
                bound_args.apply_defaults()
                context["arguments"] = _summarize(
                    {k: v for k, v in bound_args.arguments.items() if k != 'self'}
                )

            start_time = time.perf_counter()
            log_level = getattr(logging, level.upper(), logging.INFO)
            logger.log(log_level, f"Starting {operation}", extra={"extra_fields": {**context, "status": "started"}})

            try:
                result = func(self, *args, **kwargs)
            except Exception as error:
                duration_ms = round((time.perf_counter() - start_time) * 1000, 2)
                failure_level = logging.WARNING if isinstance(error, USER_FACING_ERRORS) else logging.ERROR
                logger.log(
                    failure_level,
                    f"Failed {operation}",
                    extra={"extra_fields": {**context, **_failure_context(error), "duration_ms": duration_ms}},
                )
                raise

            success_context = {**context, "status": "completed"}
            if include_performance:
                duration_ms = (time.perf_counter() - start_time) * 1000
                success_context["duration_ms"] = round(duration_ms, 2)
                if duration_ms > SLOW_OPERATION_MS:
                    success_context["slow_operation"] = True
            if include_result and result is not None:
                success_context["result"] = _summarize(result)
                success_context["result_type"] = type(result).__name__

            logger.log(log_level, f"Completed {operation}", extra={"extra_fields": success_context})
            return result

        return wrapper
    return decorator
