"""구조 파일 시스템 스캐너."""
import os
from pathlib import Path
from typing import Callable, Optional

from application.dto.structure_scan import StructureFile, StructureScanRequest
from application.ports.log_sink import ILogSink
from application.utils.debug_logger import debug_step
from common.errors import DatasetError

_FORMAT_BY_EXTENSION = {".pdb": "pdb", ".cif": "cif", ".mmcif": "cif"}


class FileSystemStructureScanner:
    """파일 시스템 스캐너 - IStructureScanner Protocol 구현."""

    def __init__(self, log_sink: Optional[ILogSink] = None) -> None:
        """스캐너 초기화.

        Args:
            log_sink: 로그 싱크 (선택적).
        """
        self._cancelled = False
        self._log_sink = log_sink

    def cancel(self) -> None:
        """스캔 취소."""
        self._cancelled = True

    def scan(
        self,
        request: StructureScanRequest,
        progress_callback: Optional[Callable[[int, str], None]] = None,
    ) -> list[StructureFile]:
        """폴더를 스캔하여 구조 파일 리스트 반환 (경로 정렬).

        Args:
            request: 스캔 요청 DTO.
            progress_callback: 진행률 콜백 (processed_count, message).

        Returns:
            StructureFile 리스트.

        Raises:
            DatasetError: 폴더가 없거나 폴더가 아닐 때.
        """
        self._cancelled = False
        root_folder = request.root_folder
        debug_step(self._log_sink, "scan_start", {"root_folder": str(root_folder)})

        if not root_folder.exists():
            raise DatasetError(f"폴더가 존재하지 않습니다: {root_folder}")
        if not root_folder.is_dir():
            raise DatasetError(f"폴더가 아닙니다: {root_folder}")

        found: list[StructureFile] = []
        dirs_to_scan = [root_folder]
        while dirs_to_scan and not self._cancelled:
            current_dir = dirs_to_scan.pop(0)
            try:
                with os.scandir(current_dir) as it:
                    for entry in it:
                        if self._cancelled:
                            break
                        if entry.name.startswith("."):
                            continue
                        if entry.is_dir(follow_symlinks=False):
                            if request.include_subdirs:
                                dirs_to_scan.append(Path(entry.path))
                            continue
                        ext = Path(entry.name).suffix.lower()
                        if not entry.is_file() or ext not in request.extensions:
                            continue
                        try:
                            size = entry.stat().st_size
                        except OSError:
                            continue
                        found.append(StructureFile(path=Path(entry.path), format=_FORMAT_BY_EXTENSION[ext], size=size))
                        if progress_callback and len(found) % 100 == 0:
                            progress_callback(len(found), f"{len(found)}개 구조 파일 발견...")
            except OSError as e:
                debug_step(
                    self._log_sink,
                    "directory_access_error",
                    {"path": str(current_dir), "error": str(e), "error_type": type(e).__name__},
                )
                continue

        found.sort(key=lambda f: str(f.path))
        debug_step(self._log_sink, "scan_complete", {"total_files": len(found), "cancelled": self._cancelled})
        return found
