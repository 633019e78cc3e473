"""입력 특징화: 참조 원자 특징, 시간 임베딩, pair/sequence 조건.

참조 특징은 서열과 무관하게 모든 잔기를 GLY backbone (N, CA, C, O)으로
취급하며, 이상 좌표는 ``resources/gly_ideal.csv`` 에서 읽는다.
"""
import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from einops import rearrange, repeat
from torch import Tensor, nn

from app.settings.constants import Constants
from common.errors import InvalidLength, ModeMismatch, OddSize

_GLY_TABLE = Path(__file__).parent / "resources" / "gly_ideal.csv"

REF_ELEMENT_SLOTS = len(Constants.REF_ELEMENTS) + 1
"""원소 one-hot 크기 (마지막 슬롯 = 기타)."""

REF_ATOM_FEATURE_DIM = 3 + 1 + 1 + REF_ELEMENT_SLOTS + Constants.REF_NAME_CHARS * Constants.REF_NAME_VOCAB
"""원자당 참조 특징 차원 (pos, charge, mask, element, name chars)."""

RELPOS_BINS = 2 * Constants.RELPOS_CLIP + 1


@dataclass(frozen=True)
class ReferenceAtom:
    """참조 원자 한 줄."""

    name: str
    element: str
    charge: float
    position: tuple[float, float, float]


@lru_cache(maxsize=1)
def load_gly_reference() -> tuple[ReferenceAtom, ...]:
    """GLY backbone 참조 원자 테이블 로드 (N, CA, C, O 순서)."""
    with _GLY_TABLE.open(encoding="utf-8") as f:
        rows = csv.DictReader(line for line in f if not line.startswith("#"))
        atoms = tuple(
            ReferenceAtom(
                name=row["atom_name"],
                element=row["element"],
                charge=float(row["charge"]),
                position=(float(row["x"]), float(row["y"]), float(row["z"])),
            )
            for row in rows
        )
    if tuple(a.name for a in atoms) != Constants.BACKBONE_ATOMS:
        raise ValueError(f"GLY reference table must list {Constants.BACKBONE_ATOMS}")
    return atoms


def _element_one_hot(element: str) -> np.ndarray:
    vec = np.zeros(REF_ELEMENT_SLOTS, dtype=np.float32)
    vocab = Constants.REF_ELEMENTS
    vec[vocab.index(element) if element in vocab else len(vocab)] = 1.0
    return vec


def _name_chars_one_hot(name: str) -> np.ndarray:
    chars = np.zeros((Constants.REF_NAME_CHARS, Constants.REF_NAME_VOCAB), dtype=np.float32)
    padded = name.ljust(Constants.REF_NAME_CHARS)[: Constants.REF_NAME_CHARS]
    for i, ch in enumerate(padded):
        chars[i, min(max(ord(ch) - 32, 0), Constants.REF_NAME_VOCAB - 1)] = 1.0
    return chars


@dataclass(frozen=True, eq=False)
class ReferenceFeatures:
    """길이 n_res 체인의 원자 단위 참조 특징 (n_atoms = 4·n_res)."""

    ref_pos: Tensor
    """(n_atoms, 3) 잔기 내부 이상 좌표."""
    ref_mask: Tensor
    """(n_atoms,) 1.0."""
    ref_element: Tensor
    """(n_atoms, 5) 원소 one-hot."""
    ref_charge: Tensor
    """(n_atoms,) 0."""
    ref_atom_name_chars: Tensor
    """(n_atoms, 4, 64) 원자 이름 문자 one-hot."""
    ref_space_uid: Tensor
    """(n_atoms,) 원자 인덱스 // 4."""
    tok_idx: Tensor
    """(n_atoms,) 소속 잔기 인덱스."""
    seq_idx: Tensor
    """(n_res,) 0..n_res-1."""

    @property
    def n_atoms(self) -> int:
        return int(self.ref_pos.shape[0])

    @property
    def n_res(self) -> int:
        return int(self.seq_idx.shape[0])

    def atom_features(self) -> Tensor:
        """(n_atoms, REF_ATOM_FEATURE_DIM) 연결 특징."""
        return torch.cat(
            [
                self.ref_pos,
                self.ref_charge[:, None],
                self.ref_mask[:, None],
                self.ref_element,
                rearrange(self.ref_atom_name_chars, "a c v -> a (c v)"),
            ],
            dim=-1,
        )

    def residue_features(self) -> Tensor:
        """(n_res, 4·REF_ATOM_FEATURE_DIM) 잔기별로 묶은 원자 특징."""
        return rearrange(self.atom_features(), "(n k) f -> n (k f)", k=Constants.ATOMS_PER_RESIDUE)


def build_reference_features(n_res: int, device: Optional[torch.device] = None) -> ReferenceFeatures:
    """GLY backbone 참조 특징 생성.

    Args:
        n_res: 잔기 수 (≥ 1).
        device: 텐서 device.

    Returns:
        ReferenceFeatures.

    Raises:
        InvalidLength: n_res < 1.
    """
    if n_res < 1:
        raise InvalidLength(f"n_res must be >= 1, got {n_res}")
    atoms = load_gly_reference()
    k = Constants.ATOMS_PER_RESIDUE
    pos = np.tile(np.array([a.position for a in atoms], dtype=np.float32), (n_res, 1))
    element = np.tile(np.stack([_element_one_hot(a.element) for a in atoms]), (n_res, 1))
    charge = np.tile(np.array([a.charge for a in atoms], dtype=np.float32), n_res)
    names = np.tile(np.stack([_name_chars_one_hot(a.name) for a in atoms]), (n_res, 1, 1))
    atom_index = torch.arange(n_res * k, device=device)
    return ReferenceFeatures(
        ref_pos=torch.from_numpy(pos).to(device),
        ref_mask=torch.ones(n_res * k, device=device),
        ref_element=torch.from_numpy(element).to(device),
        ref_charge=torch.from_numpy(charge).to(device),
        ref_atom_name_chars=torch.from_numpy(names).to(device),
        ref_space_uid=atom_index // Constants.REF_SPACE_UID_STRIDE,
        tok_idx=atom_index // k,
        seq_idx=torch.arange(n_res, device=device),
    )


def fourier_frequencies(size: int, max_frequency: float = Constants.TIME_EMBED_MAX_FREQUENCY) -> Tensor:
    """1..max_frequency 로그 간격 주파수 (size/2 개)."""
    if size % 2 != 0:
        raise OddSize(f"embedding size must be even, got {size}")
    half = size // 2
    if half == 1:
        return torch.ones(1)
    return torch.exp(torch.linspace(0.0, math.log(max_frequency), half))


def fourier_time_embedding(
    t: Tensor,
    size: int,
    max_frequency: float = Constants.TIME_EMBED_MAX_FREQUENCY,
) -> Tensor:
    """시간 t의 sinusoidal 임베딩 [sin(f·t), cos(f·t)].

    Args:
        t: (...,) 시간.
        size: 임베딩 차원 (짝수).
        max_frequency: 최대 주파수.

    Returns:
        (..., size) 텐서.

    Raises:
        OddSize: size가 홀수일 때.
    """
    freqs = fourier_frequencies(size, max_frequency).to(device=t.device, dtype=t.dtype)
    angles = t[..., None] * freqs
    return torch.cat([torch.sin(angles), torch.cos(angles)], dim=-1)


def rbf_embedding(
    distances: Tensor,
    n_centers: int = Constants.RBF_COUNT,
    d_min: float = Constants.RBF_MIN,
    d_max: float = Constants.RBF_MAX,
    width: float = Constants.RBF_WIDTH,
) -> Tensor:
    """(..., ) 거리 → (..., n_centers) Gaussian RBF exp(-(d - μ)² / (2·w²))."""
    centers = torch.linspace(d_min, d_max, n_centers, device=distances.device, dtype=distances.dtype)
    return torch.exp(-((distances[..., None] - centers) ** 2) / (2.0 * width**2))


def relative_position_one_hot(seq_idx: Tensor, clip: int = Constants.RELPOS_CLIP) -> Tensor:
    """(B, N) 잔기 인덱스 → (B, N, N, 2·clip+1) 상대 위치 one-hot."""
    offset = seq_idx[:, :, None] - seq_idx[:, None, :]
    offset = offset.clamp(-clip, clip) + clip
    return F.one_hot(offset.long(), 2 * clip + 1).float()


def _pair_distances(x: Tensor) -> Tensor:
    return torch.cdist(x, x)


class PairConditioner(nn.Module):
    """pair 표현 p (B, N, N, c_pair).

    encoder 모드: 상대 위치 + CA 거리 RBF.
    decoder 모드: 위 + 시간 임베딩 + self-conditioning CA 거리 RBF.
    """

    def __init__(self, c_pair: int, time_embed_dim: int, decoder: bool) -> None:
        super().__init__()
        self.decoder = decoder
        self.time_embed_dim = time_embed_dim
        self.relpos_proj = nn.Linear(RELPOS_BINS, c_pair, bias=False)
        self.dist_proj = nn.Linear(Constants.RBF_COUNT, c_pair, bias=False)
        if decoder:
            self.time_proj = nn.Linear(time_embed_dim, c_pair, bias=False)
            self.selfcond_proj = nn.Linear(Constants.RBF_COUNT, c_pair, bias=False)

    def forward(
        self,
        x_ca: Tensor,
        seq_idx: Tensor,
        mask: Tensor,
        t: Optional[Tensor] = None,
        selfcond_ca: Optional[Tensor] = None,
    ) -> Tensor:
        if not self.decoder and (t is not None or selfcond_ca is not None):
            raise ModeMismatch("encoder pair conditioning takes no t / self-conditioning input")
        if self.decoder and t is None:
            raise ModeMismatch("decoder pair conditioning requires t")
        p = self.relpos_proj(relative_position_one_hot(seq_idx).to(x_ca.dtype))
        p = p + self.dist_proj(rbf_embedding(_pair_distances(x_ca)))
        if self.decoder:
            t_emb = fourier_time_embedding(t.to(x_ca.dtype), self.time_embed_dim)
            p = p + self.time_proj(t_emb)[:, None, None, :]
            if selfcond_ca is None:
                selfcond_ca = torch.zeros_like(x_ca)
            p = p + self.selfcond_proj(rbf_embedding(_pair_distances(selfcond_ca)))
        pair_mask = mask[:, :, None] & mask[:, None, :]
        return p * pair_mask[..., None].to(p.dtype)


class SequenceConditioner(nn.Module):
    """잔기별 조건 c (B, N, c_cond).

    encoder 모드: 잔기별 참조 특징만 (모든 행이 동일).
    decoder 모드: 참조 특징 + 시간 임베딩 + 업샘플된 latent.
    """

    def __init__(self, c_cond: int, time_embed_dim: int, decoder: bool) -> None:
        super().__init__()
        self.decoder = decoder
        self.time_embed_dim = time_embed_dim
        self.ref_proj = nn.Linear(Constants.ATOMS_PER_RESIDUE * REF_ATOM_FEATURE_DIM, c_cond, bias=False)
        if decoder:
            self.time_proj = nn.Linear(time_embed_dim, c_cond, bias=False)

    def forward(
        self,
        ref: ReferenceFeatures,
        mask: Tensor,
        t: Optional[Tensor] = None,
        z_up: Optional[Tensor] = None,
    ) -> Tensor:
        if not self.decoder and (t is not None or z_up is not None):
            raise ModeMismatch("encoder sequence conditioning takes no t / latent input")
        if self.decoder and (t is None or z_up is None):
            raise ModeMismatch("decoder sequence conditioning requires t and the upsampled latent")
        batch = mask.shape[0]
        residue = ref.residue_features().to(self.ref_proj.weight.dtype)
        c = repeat(self.ref_proj(residue), "n c -> b n c", b=batch)
        if self.decoder:
            t_emb = fourier_time_embedding(t.to(c.dtype), self.time_embed_dim)
            c = c + self.time_proj(t_emb)[:, None, :] + z_up
        return c * mask[..., None].to(c.dtype)
