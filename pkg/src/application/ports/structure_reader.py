"""구조 파일 읽기/쓰기 Port 인터페이스."""
from typing import Optional, Protocol

from application.dto.structure_scan import StructureFormat
from domain.entities.backbone_structure import BackboneStructure


class IStructureReader(Protocol):
    """구조 파일 파서 인터페이스."""

    def parse(self, data: bytes, fmt: StructureFormat, chain: Optional[str] = None) -> BackboneStructure:
        """파일 바이트를 BackboneStructure로 파싱.

        Args:
            data: 파일 내용.
            fmt: "pdb" 또는 "cif".
            chain: 체인 ID (None이면 첫 체인).

        Raises:
            MalformedFile, ChainNotFound, EmptyChain.
        """
        ...


class IStructureWriter(Protocol):
    """구조 출력 인터페이스."""

    def write(self, structure: BackboneStructure) -> str:
        """PDB 텍스트 반환."""
        ...
