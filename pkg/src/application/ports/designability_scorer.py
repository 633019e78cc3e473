"""Designability 판정 Port 인터페이스."""
from typing import Protocol

from domain.entities.backbone_structure import BackboneStructure


class IDesignabilityScorer(Protocol):
    """구조가 'designable'인지 판정.

    기본 구현은 기하 유효성 비율로 판정한다. 서열 설계 + 구조 예측 기반
    판정기는 이 인터페이스로 주입할 수 있다.
    """

    def is_designable(self, structure: BackboneStructure) -> bool:
        ...
