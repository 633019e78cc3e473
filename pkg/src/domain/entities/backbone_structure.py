"""Backbone 구조 엔티티."""
from dataclasses import dataclass, field
from typing import Final, Optional

import numpy as np

from common.errors import ShapeMismatch

ATOM_N: Final[int] = 0
ATOM_CA: Final[int] = 1
ATOM_C: Final[int] = 2
ATOM_O: Final[int] = 3


@dataclass(frozen=True, eq=False)
class BackboneStructure:
    """단일 체인 backbone (N, CA, C, O) - 불변 객체.

    좌표 단위는 Å. ``res_mask``가 False인 잔기의 좌표는 의미가 없으며
    (0으로 채워짐) 모든 지표 계산에서 제외된다.
    """

    coords: np.ndarray
    """(n_res, 4, 3) float 좌표, 원자 순서 N, CA, C, O."""

    res_index: np.ndarray
    """(n_res,) 정수 잔기 번호 (strictly increasing)."""

    res_mask: np.ndarray
    """(n_res,) bool, 네 원자가 모두 있는 잔기만 True."""

    chain_id: str = "A"
    """체인 ID."""

    ca_b_factor: Optional[np.ndarray] = field(default=None)
    """(n_res,) CA B-factor (파일에서 읽은 경우만)."""

    def __post_init__(self) -> None:
        """유효성 검증."""
        coords = np.asarray(self.coords, dtype=np.float64)
        res_index = np.asarray(self.res_index, dtype=np.int64)
        res_mask = np.asarray(self.res_mask, dtype=bool)
        if coords.ndim != 3 or coords.shape[1:] != (4, 3):
            raise ShapeMismatch(f"coords shape must be (n_res, 4, 3), got {coords.shape}")
        n_res = coords.shape[0]
        if res_index.shape != (n_res,) or res_mask.shape != (n_res,):
            raise ShapeMismatch("res_index/res_mask length must equal n_res")
        if n_res > 1 and not np.all(np.diff(res_index) > 0):
            raise ValueError("res_index must be strictly increasing")
        if not np.all(np.isfinite(coords[res_mask])):
            raise ValueError("coords must be finite where res_mask is True")
        # 마스크된 잔기 좌표는 0으로 고정
        coords = np.where(res_mask[:, None, None], coords, 0.0)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "res_index", res_index)
        object.__setattr__(self, "res_mask", res_mask)
        if self.ca_b_factor is not None:
            b = np.asarray(self.ca_b_factor, dtype=np.float64)
            if b.shape != (n_res,):
                raise ShapeMismatch("ca_b_factor length must equal n_res")
            object.__setattr__(self, "ca_b_factor", b)

    @property
    def n_res(self) -> int:
        """잔기 수 (마스크 포함)."""
        return int(self.coords.shape[0])

    @property
    def ca(self) -> np.ndarray:
        """(n_res, 3) CA 좌표."""
        return self.coords[:, ATOM_CA]

    def with_coords(self, coords: np.ndarray) -> "BackboneStructure":
        """좌표만 교체한 새 구조 반환."""
        return BackboneStructure(
            coords=coords,
            res_index=self.res_index,
            res_mask=self.res_mask,
            chain_id=self.chain_id,
            ca_b_factor=self.ca_b_factor,
        )

    @classmethod
    def from_coords(cls, coords: np.ndarray, chain_id: str = "A") -> "BackboneStructure":
        """마스크 없는 좌표 배열로부터 생성 (res_index = 1..n)."""
        coords = np.asarray(coords, dtype=np.float64)
        n_res = coords.shape[0]
        return cls(
            coords=coords,
            res_index=np.arange(1, n_res + 1),
            res_mask=np.ones(n_res, dtype=bool),
            chain_id=chain_id,
        )


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """강체 변환 x' = R x + t."""

    rotation: np.ndarray
    """(3, 3) 직교 행렬, det = +1."""

    translation: np.ndarray
    """(3,) 평행 이동."""

    def __post_init__(self) -> None:
        """유효성 검증."""
        rotation = np.asarray(self.rotation, dtype=np.float64)
        translation = np.asarray(self.translation, dtype=np.float64)
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise ShapeMismatch("rotation must be (3, 3) and translation (3,)")
        if not np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-6):
            raise ValueError("rotation must be orthonormal")
        if not np.isclose(np.linalg.det(rotation), 1.0, atol=1e-6):
            raise ValueError("rotation must have det = +1")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    def apply(self, coords: np.ndarray) -> np.ndarray:
        """(..., 3) 좌표에 변환 적용."""
        return np.asarray(coords) @ self.rotation.T + self.translation

    def apply_to(self, structure: BackboneStructure) -> BackboneStructure:
        """구조에 변환 적용 (마스크된 잔기는 0 유지)."""
        return structure.with_coords(self.apply(structure.coords))
