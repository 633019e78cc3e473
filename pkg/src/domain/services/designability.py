"""designability 판정 (IDesignabilityScorer 기본 구현)."""
from app.settings.constants import Constants
from domain.entities.backbone_structure import BackboneStructure
from domain.services.structure_metrics import geometry_validity


class GeometryValidityDesignability:
    """기하 유효 잔기 비율이 임계값 이상이면 designable.

    역접힘/서열 설계 모델 없이 쓸 수 있는 대리 기준.
    """

    def __init__(self, min_fraction: float = Constants.DESIGNABLE_VALIDITY_FRACTION) -> None:
        self._min_fraction = min_fraction

    def is_designable(self, structure: BackboneStructure) -> bool:
        return geometry_validity(structure).fraction_valid >= self._min_fraction
