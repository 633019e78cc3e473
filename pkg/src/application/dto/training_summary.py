"""학습 요약 DTO."""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass
class TrainingSummary:
    """학습 실행 요약."""

    kind: str
    """"autoencoder" 또는 "pldm"."""

    steps: int
    """수행한 스텝 수."""

    initial_loss: float
    """첫 스텝 손실."""

    final_loss: float
    """마지막 log_every 구간 평균 손실."""

    elapsed_ms: int
    """경과 시간 (밀리초)."""

    checkpoint_path: Path
    """최종 체크포인트 경로."""

    checkpoint_id: str
    """체크포인트 ID (payload xxhash64)."""

    loss_csv_path: Optional[Path] = None
    """손실 CSV 경로."""

    cached_latents: int = 0
    """PLDM 학습 시 캐시에서 재사용한 latent 수."""
