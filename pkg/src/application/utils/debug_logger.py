"""로그 싱크 헬퍼 (단계 로그, 구간 로그, 메모리 사용량)."""
from contextlib import contextmanager
from datetime import datetime
from time import perf_counter
from typing import Any, Iterator, Optional

import psutil

from app.settings.constants import Constants
from application.dto.log_entry import LogEntry
from application.ports.log_sink import ILogSink


def log_event(
    log_sink: Optional[ILogSink],
    level: str,
    message: str,
    context: Optional[dict[str, Any]] = None,
) -> None:
    """임의 레벨 로그 기록.

    Args:
        log_sink: 로그 싱크 (None이면 로깅하지 않음).
        level: "DEBUG" | "INFO" | "WARNING" | "ERROR".
        message: 메시지.
        context: 추가 컨텍스트.
    """
    if log_sink:
        log_sink.write(LogEntry(timestamp=datetime.now(), level=level, message=message, context=context or {}))


def debug_step(
    log_sink: Optional[ILogSink],
    step_name: str,
    details: Optional[dict[str, Any]] = None,
) -> None:
    """단계별 디버깅 로그.

    Args:
        log_sink: 로그 싱크 (None이면 로깅하지 않음).
        step_name: 단계 이름.
        details: 추가 상세 정보 (선택적).

    Example:
        ```python
        debug_step(log_sink, "latent_cache_hit", {"found": 12})
        ```
    """
    log_event(log_sink, "DEBUG", f"STEP | {step_name}", details)


@contextmanager
def debug_context(
    log_sink: Optional[ILogSink],
    operation_name: str,
    details: Optional[dict[str, Any]] = None,
) -> Iterator[None]:
    """구간 시작/종료 로그 (경과 ms 포함).

    Args:
        log_sink: 로그 싱크 (None이면 로깅하지 않음).
        operation_name: 작업 이름.
        details: 추가 상세 정보 (선택적).
    """
    start = perf_counter()
    log_event(log_sink, "DEBUG", f"CONTEXT_START | {operation_name}", details)
    try:
        yield
    finally:
        duration_ms = int((perf_counter() - start) * Constants.MILLISECONDS_PER_SECOND)
        log_event(log_sink, "DEBUG", f"CONTEXT_END | {operation_name} | {duration_ms}ms")


def resident_memory_mb() -> float:
    """현재 프로세스 RSS (MB)."""
    return psutil.Process().memory_info().rss / Constants.BYTES_PER_MB
