"""구조/latent 리스트 → 패딩된 배치 텐서."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import torch
from torch import Tensor

from domain.entities.backbone_structure import BackboneStructure
from domain.value_objects.latent_representation import LatentRepresentation


def padded_length(n: int, multiple_of: int) -> int:
    """n 이상인 가장 작은 multiple_of 배수."""
    return -(-n // multiple_of) * multiple_of


@dataclass
class StructureBatch:
    """패딩된 구조 배치."""

    x: Tensor
    """(B, N_pad, 4, 3) 좌표 (패딩 0)."""
    mask: Tensor
    """(B, N_pad) bool."""
    n_res: list[int]
    """항목별 원래 길이."""
    res_index: Optional[Tensor] = None
    """(B, N_pad) int64 잔기 번호 (패딩 위치는 마지막 번호 + 1, + 2, ...)."""


@dataclass
class LatentBatch:
    """패딩된 latent 배치."""

    z: Tensor
    """(B, Nd_pad, d)."""
    mask: Tensor
    """(B, Nd_pad) bool."""
    n_res: list[int]


def collate_structures(
    structures: Sequence[BackboneStructure],
    multiple_of: int = 1,
    dtype: torch.dtype = torch.float32,
    device: Optional[torch.device] = None,
) -> StructureBatch:
    """오른쪽 0 패딩 + 마스크. 길이는 multiple_of 배수로 맞춘다."""
    n_max = padded_length(max(s.n_res for s in structures), multiple_of)
    x = np.zeros((len(structures), n_max, 4, 3), dtype=np.float64)
    mask = np.zeros((len(structures), n_max), dtype=bool)
    res_index = np.zeros((len(structures), n_max), dtype=np.int64)
    for i, structure in enumerate(structures):
        n = structure.n_res
        x[i, :n] = structure.coords
        mask[i, :n] = structure.res_mask
        res_index[i, :n] = structure.res_index
        res_index[i, n:] = structure.res_index[-1] + np.arange(1, n_max - n + 1)
    return StructureBatch(
        x=torch.as_tensor(x, dtype=dtype, device=device),
        mask=torch.as_tensor(mask, device=device),
        n_res=[s.n_res for s in structures],
        res_index=torch.as_tensor(res_index, device=device),
    )


def collate_latents(
    latents: Sequence[LatentRepresentation],
    dtype: torch.dtype = torch.float32,
    device: Optional[torch.device] = None,
) -> LatentBatch:
    """latent 리스트 패딩."""
    n_max = max(lat.n_down for lat in latents)
    dim = latents[0].dim
    z = np.zeros((len(latents), n_max, dim), dtype=np.float32)
    mask = np.zeros((len(latents), n_max), dtype=bool)
    for i, lat in enumerate(latents):
        z[i, : lat.n_down] = lat.z
        mask[i, : lat.n_down] = True
    return LatentBatch(
        z=torch.as_tensor(z, dtype=dtype, device=device),
        mask=torch.as_tensor(mask, device=device),
        n_res=[lat.n_res for lat in latents],
    )
