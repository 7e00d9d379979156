"""
Base functionality for MCP tools including decorators and shared utilities
"""

import functools
import inspect
import logging
import time
from typing import Any, Callable, Dict

from ..utils.errors import ErrorType, RankTestError, format_error_for_user, get_error_suggestion

logger = logging.getLogger(__name__)

# Arguments longer than this are shortened in activity logs
MAX_LOGGED_ARGUMENT = 200


def _error_payload(error: RankTestError, message: str) -> Dict[str, Any]:
    payload = error.to_dict()
    payload.update(
        success=False,
        error=message,
        suggestions=get_error_suggestion(error.error_type),
    )
    return payload


def with_error_handling(func: Callable) -> Callable:
    """Decorator to add standard error handling to tool functions"""
    @functools.wraps(func)
    async def wrapper(*args, **kwargs):
        try:
            return await func(*args, **kwargs)
        except RankTestError as e:
            logger.warning(f"{func.__name__} rejected input: {e.message}")
            return _error_payload(e, format_error_for_user(e))
        except Exception as e:
            logger.error(f"Error in {func.__name__}: {str(e)}", exc_info=True)
            wrapped = RankTestError.from_exception(e, ErrorType.PROCESSING_ERROR)
            return _error_payload(wrapped, f"Tool execution failed: {str(e)}")
    return wrapper


def _summarize_arguments(func: Callable, args, kwargs) -> Dict[str, Any]:
    bound = inspect.signature(func).bind(*args, **kwargs)
    bound.apply_defaults()
    summary = {}
    for name, value in bound.arguments.items():
        text = repr(value)
        summary[name] = text if len(text) <= MAX_LOGGED_ARGUMENT else text[:MAX_LOGGED_ARGUMENT] + "..."
    return summary


def with_activity_logging(func: Callable) -> Callable:
    """Decorator to log tool calls with their arguments, duration and outcome"""
    @functools.wraps(func)
    async def wrapper(*args, **kwargs):
        start_time = time.time()
        request_data = _summarize_arguments(func, args, kwargs)
        logger.info(f"Tool call {func.__name__}: {request_data}")

        try:
            result = await func(*args, **kwargs)
        except Exception as e:
            duration_ms = (time.time() - start_time) * 1000
            logger.error(f"Tool {func.__name__} raised after {duration_ms:.0f} ms: {e}")
            raise

        duration_ms = (time.time() - start_time) * 1000
        outcome = "ok"
        if isinstance(result, dict) and result.get("success") is False:
            outcome = result.get("error_type", "error")
        logger.info(f"Tool {func.__name__} finished in {duration_ms:.0f} ms ({outcome})")
        return result

    return wrapper
