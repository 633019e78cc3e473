"""체크포인트 저장소 Port 인터페이스."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol

import numpy as np


@dataclass
class CheckpointPayload:
    """체크포인트 내용."""

    tensors: dict[str, np.ndarray]
    """이름 → float32 배열 (state_dict 순서 유지)."""

    metadata: dict[str, Any] = field(default_factory=dict)
    """설정 스냅샷, 종류, 스텝 등."""

    checkpoint_id: str = ""
    """payload xxhash64 (읽을 때 채워짐)."""


class ICheckpointStore(Protocol):
    """이름 붙은 텐서 체크포인트 저장소."""

    def save(self, path: Path, payload: CheckpointPayload) -> str:
        """저장 후 checkpoint_id 반환."""
        ...

    def load(self, path: Path) -> CheckpointPayload:
        """로드. 실패 시 CheckpointError."""
        ...
