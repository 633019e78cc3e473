"""CLI 명령 요청 DTO."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class ReconstructRequest:
    """재구성 요청."""

    ae_checkpoint: Path
    input_dir: Optional[Path] = None
    """None이면 설정의 데이터셋 (합성 코퍼스 포함)."""
    seed: int = 0
    ode_steps: Optional[int] = None
    """None이면 체크포인트 설정의 ode_steps."""


@dataclass(frozen=True)
class SampleRequest:
    """PLDM 샘플링 요청."""

    pldm_checkpoint: Path
    ae_checkpoint: Path
    lengths: tuple[int, ...]
    per_length: int
    gammas: tuple[Optional[float], ...] = (None,)
    """None 원소는 설정값 사용."""
    seed: int = 0
    reference_dir: Optional[Path] = None
    ode_steps: Optional[int] = None


@dataclass(frozen=True)
class EvalRequest:
    """디렉토리 평가 요청."""

    input_dir: Path
    reference_dir: Optional[Path] = None


@dataclass(frozen=True)
class ProbeRequest:
    """유연성 probe 요청."""

    ae_checkpoint: Path
    input_dir: Path


@dataclass(frozen=True)
class SweepRequest:
    """bottleneck sweep 요청."""

    downsamples: tuple[int, ...] = (1, 2, 4)
    latent_dims: tuple[int, ...] = field(default=(4, 8, 16))
    seed: int = 0
