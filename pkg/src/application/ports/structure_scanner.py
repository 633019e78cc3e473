"""구조 파일 스캐너 Port 인터페이스."""
from typing import Callable, Optional, Protocol

from application.dto.structure_scan import StructureFile, StructureScanRequest


class IStructureScanner(Protocol):
    """구조 파일 스캐너 인터페이스.

    폴더를 스캔하여 구조 파일 목록(경로 정렬)을 반환한다.
    Infrastructure 계층에서 구현해야 함.
    """

    def scan(
        self,
        request: StructureScanRequest,
        progress_callback: Optional[Callable[[int, str], None]] = None,
    ) -> list[StructureFile]:
        """폴더를 스캔하여 StructureFile 리스트 반환.

        Args:
            request: 스캔 요청 DTO.
            progress_callback: 진행률 콜백 (processed_count, message).

        Returns:
            경로 순으로 정렬된 StructureFile 리스트.
        """
        ...

    def cancel(self) -> None:
        """스캔 취소."""
        ...
