"""Latent 캐시 Port 인터페이스."""
from typing import Optional, Protocol

from domain.value_objects.latent_representation import LatentRepresentation


class ILatentCache(Protocol):
    """체크포인트별 latent 캐시.

    (checkpoint_id, structure_id) 당 레코드 하나.
    Infrastructure 계층에서 구현해야 함.
    """

    def get_many(self, checkpoint_id: str, structure_ids: list[str]) -> dict[str, LatentRepresentation]:
        """캐시된 latent 조회 (없는 ID는 결과에서 빠짐)."""
        ...

    def put_many(self, checkpoint_id: str, items: dict[str, LatentRepresentation]) -> None:
        """latent 배치 저장 (이미 있으면 유지)."""
        ...

    def created_at(self, checkpoint_id: str, structure_id: str) -> Optional[str]:
        """레코드 생성 시각 (ISO 문자열). 없으면 None."""
        ...
