"""예외 → CLI 종료 코드 매핑."""
from typing import Final

from common.errors import (
    CheckpointError,
    ConfigError,
    DatasetError,
    DomainError,
)

EXIT_OK: Final[int] = 0
"""정상 종료."""

EXIT_CONFIG_ERROR: Final[int] = 1
"""설정/체크포인트 에러."""

EXIT_DATA_ERROR: Final[int] = 2
"""데이터 에러 (구조 파일, 데이터셋, 도메인 검증)."""


def map_exit_code(error: BaseException) -> int:
    """예외를 CLI 종료 코드로 변환.

    Args:
        error: 발생한 예외.

    Returns:
        종료 코드. ConfigError/CheckpointError는 1, 데이터 관련 에러는 2.
        프로젝트 에러가 아닌 예외는 1로 취급한다.
    """
    if isinstance(error, (ConfigError, CheckpointError)):
        return EXIT_CONFIG_ERROR
    if isinstance(error, (DatasetError, DomainError)):
        return EXIT_DATA_ERROR
    return EXIT_CONFIG_ERROR


def describe_error(error: BaseException) -> dict[str, str]:
    """리포트/로그 컨텍스트용 에러 요약.

    Args:
        error: 발생한 예외.

    Returns:
        ``{"error_type": ..., "error": ...}`` 딕셔너리.
    """
    return {"error_type": type(error).__name__, "error": str(error)}
