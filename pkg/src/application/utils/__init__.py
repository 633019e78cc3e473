"""Application utilities package."""
from application.utils.debug_logger import (
    debug_context,
    debug_step,
    log_event,
)

__all__ = [
    "log_event",
    "debug_step",
    "debug_context",
]
