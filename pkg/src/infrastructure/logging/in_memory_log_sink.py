"""인메모리 로그 싱크 구현."""
import json
from collections import deque
from pathlib import Path
from typing import Callable, Optional

from app.settings.constants import Constants
from application.dto.log_entry import LogEntry

_LEVEL_ORDER = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40}

_ANSI_COLORS = {
    "ERROR": "\033[91m",
    "WARNING": "\033[93m",
    "INFO": "\033[94m",
    "DEBUG": "\033[90m",
}


class InMemoryLogSink:
    """인메모리 로그 싱크 - ILogSink 구현.

    최근 N개 로그를 메모리에 저장하고, 콘솔 출력(최소 레벨 이상)과
    날짜별 로그 파일(전체 레벨) 기록, 구독자 콜백 알림을 수행한다.

    ILogSink Protocol을 구현 (구조적 서브타이핑, 상속 불필요).
    """

    def __init__(
        self,
        log_dir: Optional[Path] = None,
        console_level: str = "INFO",
        console: bool = True,
    ) -> None:
        """인메모리 로그 싱크 초기화.

        Args:
            log_dir: 로그 파일 저장 디렉토리 (None이면 파일 기록 안 함).
            console_level: 콘솔 출력 최소 레벨.
            console: 콘솔 출력 여부.
        """
        self._logs: deque[LogEntry] = deque(maxlen=Constants.MAX_LOG_ENTRIES)
        self._listeners: list[Callable[[LogEntry], None]] = []
        self._console = console
        self._console_level = _LEVEL_ORDER.get(console_level, 20)
        self._log_dir = Path(log_dir) if log_dir is not None else None
        if self._log_dir is not None:
            self._log_dir.mkdir(parents=True, exist_ok=True)
        self._current_log_file: Optional[Path] = None
        self._current_date: Optional[str] = None

    def subscribe(self, listener: Callable[[LogEntry], None]) -> None:
        """로그 추가 알림 구독."""
        self._listeners.append(listener)

    def write(self, entry: LogEntry) -> None:
        """로그 엔트리 기록.

        Args:
            entry: 로그 엔트리.
        """
        self._logs.append(entry)
        for listener in self._listeners:
            listener(entry)
        if self._console and _LEVEL_ORDER.get(entry.level, 20) >= self._console_level:
            self._print_to_console(entry)
        if self._log_dir is not None:
            self._write_to_file(entry)

    def get_logs(self, level: Optional[str] = None) -> list[LogEntry]:
        """로그 목록 조회.

        Args:
            level: 로그 레벨 필터 (선택적).

        Returns:
            필터링된 로그 엔트리 리스트.
        """
        logs = list(self._logs)
        if level is not None:
            logs = [log for log in logs if log.level == level]
        return logs

    @staticmethod
    def _format_context(entry: LogEntry, max_chars: Optional[int]) -> str:
        if not entry.context:
            return ""
        try:
            text = json.dumps(entry.context, ensure_ascii=False, separators=(",", ":"), default=str)
        except (TypeError, ValueError):
            text = str(entry.context)
        if max_chars is not None and len(text) > max_chars:
            text = text[: max_chars - 3] + "..."
        return f" | {text}"

    def _print_to_console(self, entry: LogEntry) -> None:
        """콘솔에 로그 출력 (레벨별 ANSI 색상)."""
        context_str = self._format_context(entry, Constants.LOG_CONTEXT_MAX_CHARS)
        line = f"[{entry.timestamp.strftime('%H:%M:%S')}] [{entry.level}] {entry.message}{context_str}"
        color = _ANSI_COLORS.get(entry.level)
        print(f"{color}{line}\033[0m" if color else line)

    def _write_to_file(self, entry: LogEntry) -> None:
        """날짜별 로그 파일 (YYYY-MM-DD.log)에 추가."""
        try:
            date_str = entry.timestamp.strftime("%Y-%m-%d")
            if self._current_date != date_str:
                self._current_date = date_str
                self._current_log_file = self._log_dir / f"{date_str}.log"
            timestamp_str = entry.timestamp.strftime("%Y-%m-%d %H:%M:%S.%f")[:-3]
            context_str = self._format_context(entry, None)
            line = f"[{timestamp_str}] [{entry.level}] {entry.message}{context_str}\n"
            with open(self._current_log_file, "a", encoding=Constants.LOG_FILE_ENCODING) as f:
                f.write(line)
        except OSError as e:
            # 파일 쓰기 실패 시 콘솔에만 에러 출력 (무한 루프 방지)
            print(f"[ERROR] 로그 파일 쓰기 실패: {e}")
