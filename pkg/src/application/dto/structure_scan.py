"""구조 파일 스캔 DTO."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from app.settings.constants import Constants

StructureFormat = Literal["pdb", "cif"]


@dataclass(frozen=True)
class StructureScanRequest:
    """구조 파일 스캔 요청."""

    root_folder: Path
    """스캔 루트 폴더."""

    include_subdirs: bool = True
    """하위 폴더 포함 여부."""

    extensions: tuple[str, ...] = field(default=Constants.STRUCTURE_EXTENSIONS)
    """허용 확장자 (소문자, 점 포함)."""


@dataclass(frozen=True)
class StructureFile:
    """스캔된 구조 파일."""

    path: Path
    """파일 경로."""

    format: StructureFormat
    """"pdb" 또는 "cif"."""

    size: int
    """파일 크기 (바이트)."""

    def __post_init__(self) -> None:
        """유효성 검증."""
        if self.size < 0:
            raise ValueError("size must be >= 0")

    @property
    def structure_name(self) -> str:
        """확장자를 뺀 파일 이름."""
        return self.path.stem
