"""Latent 표현 값 객체."""
from dataclasses import dataclass

import numpy as np

from common.errors import ShapeMismatch


@dataclass(frozen=True, eq=False)
class LatentRepresentation:
    """구조 하나의 latent z (n_down, d)."""

    z: np.ndarray
    """(n_down, d) float32."""

    n_res: int
    """원래 구조 길이 (디코딩 목표 길이)."""

    def __post_init__(self) -> None:
        """유효성 검증."""
        z = np.asarray(self.z, dtype=np.float32)
        if z.ndim != 2:
            raise ShapeMismatch(f"latent must be 2-D (n_down, d), got {z.shape}")
        if self.n_res < z.shape[0]:
            raise ShapeMismatch("n_res must be >= n_down")
        object.__setattr__(self, "z", z)

    @property
    def n_down(self) -> int:
        return int(self.z.shape[0])

    @property
    def dim(self) -> int:
        return int(self.z.shape[1])
