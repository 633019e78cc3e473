"""지표 리포트 DTO."""
from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass
class StructureRecord:
    """구조 하나에 대한 결과 레코드."""

    structure_id: str
    """구조 식별자 (파일 이름 또는 생성 이름)."""

    n_res: Optional[int] = None
    """잔기 수 (파싱 실패 시 None)."""

    metrics: dict[str, Any] = field(default_factory=dict)
    """지표 값 (예: {"ca_rmsd": 0.8})."""

    error: Optional[str] = None
    """에러 메시지 (실패 레코드)."""

    error_type: Optional[str] = None
    """에러 클래스 이름."""

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class MetricReport:
    """레코드 목록 + 집계."""

    command: str
    """리포트를 만든 명령 이름."""

    records: list[StructureRecord] = field(default_factory=list)
    """구조별 레코드."""

    aggregate: dict[str, Any] = field(default_factory=dict)
    """집계 지표 (평균/표준편차, 실행 단위 지표, 효율 등)."""

    provenance: dict[str, Any] = field(default_factory=dict)
    """출처 (config_hash, checkpoint_id 등)."""

    @property
    def n_failed(self) -> int:
        return sum(1 for r in self.records if r.failed)
