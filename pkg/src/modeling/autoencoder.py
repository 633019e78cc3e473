"""ProteinAE: 구조 → latent 인코더, latent 조건 flow 디코더."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import torch
import torch.nn.functional as F
from einops import rearrange
from torch import Tensor, nn

from app.settings.constants import Constants
from common.errors import InvalidLength, ShapeMismatch, TooShort
from domain.entities.backbone_structure import ATOM_CA, BackboneStructure
from domain.value_objects.latent_representation import LatentRepresentation
from modeling.atom_attention import AllAtomDecoder, AllAtomEncoder, LocalWindow
from modeling.batching import collate_structures, padded_length
from modeling.dit_core import DiTConfig, DiTStack
from modeling.featurization import PairConditioner, SequenceConditioner, build_reference_features
from modeling.flow import euler_integrate, interpolate, reconstruction_loss

MIN_ENCODE_LENGTH = 4


@dataclass(frozen=True)
class AutoencoderConfig:
    """ProteinAE 하이퍼파라미터."""

    dit: DiTConfig
    latent_dim: int = Constants.AE_LATENT_DIM
    downsample: int = Constants.AE_DOWNSAMPLE
    ode_steps: int = Constants.AE_ODE_STEPS
    time_embed_dim: int = Constants.TIME_EMBED_DIM
    c_atom: int = Constants.ATOM_DIM
    c_atompair: int = Constants.ATOM_PAIR_DIM
    atom_layers: int = Constants.ATOM_LAYERS
    atom_heads: int = Constants.ATOM_HEADS
    window: LocalWindow = field(default_factory=LocalWindow)
    self_cond_prob: float = Constants.SELF_COND_PROB

    def __post_init__(self) -> None:
        """유효성 검증."""
        if self.downsample not in (1, 2, 4):
            raise InvalidLength(f"downsample must be 1, 2 or 4, got {self.downsample}")
        if self.latent_dim > self.dit.token_dim:
            raise ShapeMismatch("latent_dim must be <= token_dim")
        if self.ode_steps < 1:
            raise InvalidLength("ode_steps must be >= 1")

    @property
    def n_conv(self) -> int:
        return int(math.log2(self.downsample))


def n_downsampled(n_res: int, downsample: int) -> int:
    """ceil(n_res / r)."""
    return -(-n_res // downsample)


class LengthDownsampler(nn.Module):
    """stride 2 Conv1d (kernel 3, padding 1)를 log2(r)번 적용.

    출력 행은 conv 창 (2j-1, 2j, 2j+1) 안에 유효 잔기가 하나라도 있으면 유효하다.
    """

    def __init__(self, dim: int, n_conv: int) -> None:
        super().__init__()
        self.convs = nn.ModuleList(
            [nn.Conv1d(dim, dim, kernel_size=3, stride=2, padding=1) for _ in range(n_conv)]
        )

    def forward(self, s: Tensor, mask: Tensor) -> tuple[Tensor, Tensor]:
        for conv in self.convs:
            s = s * mask[..., None].to(s.dtype)
            s = rearrange(conv(rearrange(s, "b n d -> b d n")), "b d n -> b n d")
            mask = F.max_pool1d(mask.to(s.dtype)[:, None], kernel_size=3, stride=2, padding=1)[:, 0] > 0
        return s * mask[..., None].to(s.dtype), mask


class LatentUpsampler(nn.Module):
    """LinearNoBias(d → c_cond) 후 길이 방향 최근접 보간."""

    def __init__(self, latent_dim: int, c_cond: int) -> None:
        super().__init__()
        self.proj = nn.Linear(latent_dim, c_cond, bias=False)

    def forward(self, z: Tensor, n_target: int) -> Tensor:
        if n_target < z.shape[1]:
            raise InvalidLength(f"n_target {n_target} is shorter than the latent ({z.shape[1]})")
        h = rearrange(self.proj(z), "b n c -> b c n")
        return rearrange(F.interpolate(h, size=n_target, mode="nearest"), "b c n -> b n c")


def upsample_latent(z: Tensor, n_target: int, upsampler: LatentUpsampler) -> Tensor:
    """함수형 진입점."""
    return upsampler(z, n_target)


def _seq_idx(batch: int, n_res: int, device: torch.device, res_index: Optional[Tensor] = None) -> Tensor:
    """잔기 번호 (첫 잔기 = 0). res_index가 없으면 0..n_res-1."""
    if res_index is None:
        return torch.arange(n_res, device=device).expand(batch, n_res)
    if res_index.shape != (batch, n_res):
        raise ShapeMismatch(f"res_index {tuple(res_index.shape)} does not match ({batch}, {n_res})")
    return res_index - res_index[:, :1]


class ProteinEncoder(nn.Module):
    """구조 → (B, N_down, d) latent. 마지막 LayerNorm은 학습 파라미터가 없다.

    상대 위치와 RoPE는 입력 잔기 번호를 따르므로 사슬 끊김이 반영된다.
    """

    def __init__(self, config: AutoencoderConfig) -> None:
        super().__init__()
        dit = config.dit
        self.seq_cond = SequenceConditioner(dit.c_cond, config.time_embed_dim, decoder=False)
        self.pair_cond = PairConditioner(dit.c_pair, config.time_embed_dim, decoder=False)
        self.atom_encoder = AllAtomEncoder(
            config.c_atom, config.c_atompair, dit.token_dim, dit.c_cond, dit.c_pair,
            config.atom_layers, config.atom_heads, config.window,
        )
        self.trunk = DiTStack(dit)
        self.downsampler = LengthDownsampler(dit.token_dim, config.n_conv)
        self.to_latent = nn.Linear(dit.token_dim, config.latent_dim, bias=False)
        self.latent_norm = nn.LayerNorm(config.latent_dim, elementwise_affine=False)

    def forward(self, x1: Tensor, mask: Tensor, res_index: Optional[Tensor] = None) -> tuple[Tensor, Tensor]:
        batch, n_res = x1.shape[:2]
        ref = build_reference_features(n_res, x1.device)
        seq_idx = _seq_idx(batch, n_res, x1.device, res_index)
        c = self.seq_cond(ref, mask)
        p = self.pair_cond(x1[:, :, ATOM_CA], seq_idx, mask)
        s, _ = self.atom_encoder(x1, ref, c, p, mask)
        s = self.trunk(s, c, p=p, mask=mask, positions=seq_idx)
        s, z_mask = self.downsampler(s, mask)
        z = self.latent_norm(self.to_latent(s))
        return z * z_mask[..., None].to(z.dtype), z_mask


class ProteinDecoder(nn.Module):
    """(x_t, t, z) → 원자별 velocity (B, N, 4, 3)."""

    def __init__(self, config: AutoencoderConfig) -> None:
        super().__init__()
        dit = config.dit
        self.upsampler = LatentUpsampler(config.latent_dim, dit.c_cond)
        self.seq_cond = SequenceConditioner(dit.c_cond, config.time_embed_dim, decoder=True)
        self.pair_cond = PairConditioner(dit.c_pair, config.time_embed_dim, decoder=True)
        self.atom_encoder = AllAtomEncoder(
            config.c_atom, config.c_atompair, dit.token_dim, dit.c_cond, dit.c_pair,
            config.atom_layers, config.atom_heads, config.window,
        )
        self.trunk = DiTStack(dit)
        self.atom_decoder = AllAtomDecoder(
            config.c_atom, config.c_atompair, dit.token_dim,
            config.atom_layers, config.atom_heads, config.window,
        )

    def forward(
        self,
        x_t: Tensor,
        t: Tensor,
        z: Tensor,
        mask: Tensor,
        selfcond_ca: Optional[Tensor] = None,
    ) -> Tensor:
        batch, n_res = x_t.shape[:2]
        ref = build_reference_features(n_res, x_t.device)
        seq_idx = _seq_idx(batch, n_res, x_t.device)
        z_up = self.upsampler(z, n_res)
        c = self.seq_cond(ref, mask, t=t, z_up=z_up)
        p = self.pair_cond(x_t[:, :, ATOM_CA], seq_idx, mask, t=t, selfcond_ca=selfcond_ca)
        s, skip = self.atom_encoder(x_t, ref, c, p, mask)
        s = self.trunk(s, c, p=p, mask=mask, positions=seq_idx)
        return self.atom_decoder(s, skip, mask)


class ProteinAE(nn.Module):
    """인코더 + 디코더."""

    def __init__(self, config: AutoencoderConfig) -> None:
        super().__init__()
        self.config = config
        self.encoder = ProteinEncoder(config)
        self.decoder = ProteinDecoder(config)

    def training_loss(
        self,
        x1: Tensor,
        mask: Tensor,
        t: Tensor,
        use_self_cond: bool,
        generator: Optional[torch.Generator] = None,
        res_index: Optional[Tensor] = None,
    ) -> Tensor:
        """한 배치의 flow matching 손실.

        Args:
            x1: (B, N, 4, 3) 중심화된 데이터 (N은 r의 배수).
            mask: (B, N).
            t: (B,) 시간.
            use_self_cond: True면 no-grad 추정 x̂ 의 CA를 pair 조건으로 사용.
            generator: 노이즈 생성기.
            res_index: (B, N) 잔기 번호 (인코더 위치, None이면 0..N-1).
        """
        atom_mask = mask[:, :, None, None].to(x1.dtype)
        z, _ = self.encoder(x1, mask, res_index)
        x0 = torch.randn(x1.shape, generator=generator, dtype=x1.dtype, device=x1.device) * atom_mask
        x_t = interpolate(x0, x1, t)
        selfcond_ca = None
        if use_self_cond:
            with torch.no_grad():
                v_sc = self.decoder(x_t, t, z, mask)
                estimate = x_t + (1.0 - t)[:, None, None, None] * v_sc
            selfcond_ca = estimate[:, :, ATOM_CA].detach()
        v = self.decoder(x_t, t, z, mask, selfcond_ca)
        return reconstruction_loss(v, x1, x0, mask)

    @torch.no_grad()
    def sample_from_latent(
        self,
        z: Tensor,
        mask: Tensor,
        generator: Optional[torch.Generator] = None,
        n_steps: Optional[int] = None,
    ) -> Tensor:
        """latent 조건 Euler ODE 디코딩 (t: 0 → 1), (B, N, 4, 3) 반환."""
        steps = n_steps or self.config.ode_steps
        shape = (mask.shape[0], mask.shape[1], 4, 3)
        x0 = torch.randn(shape, generator=generator, dtype=z.dtype, device=z.device)
        x0 = x0 * mask[:, :, None, None].to(z.dtype)

        def velocity(x: Tensor, t: float, estimate: Optional[Tensor]) -> Tensor:
            t_batch = torch.full((x.shape[0],), t, dtype=x.dtype, device=x.device)
            selfcond_ca = None if estimate is None else estimate[:, :, ATOM_CA]
            return self.decoder(x, t_batch, z, mask, selfcond_ca)

        return euler_integrate(velocity, x0, steps, self_condition=True)


def _model_dtype(model: nn.Module) -> torch.dtype:
    return next(model.parameters()).dtype


def _model_device(model: nn.Module) -> torch.device:
    return next(model.parameters()).device


@torch.no_grad()
def encode_structures(structures: list[BackboneStructure], model: ProteinAE) -> list[LatentRepresentation]:
    """구조 리스트 → latent 리스트 (배치 처리).

    Raises:
        TooShort: n_res < 4 인 구조가 있을 때.
    """
    for structure in structures:
        if structure.n_res < MIN_ENCODE_LENGTH:
            raise TooShort(f"encoding needs >= {MIN_ENCODE_LENGTH} residues, got {structure.n_res}")
    r = model.config.downsample
    batch = collate_structures(structures, r, _model_dtype(model), _model_device(model))
    z, _ = model.encoder(batch.x, batch.mask, batch.res_index)
    latents = []
    for i, n_res in enumerate(batch.n_res):
        n_down = n_downsampled(n_res, r)
        latents.append(LatentRepresentation(z=z[i, :n_down].float().cpu().numpy(), n_res=n_res))
    return latents


def encode(structure: BackboneStructure, model: ProteinAE) -> LatentRepresentation:
    """구조 하나를 latent로 인코딩."""
    return encode_structures([structure], model)[0]


@torch.no_grad()
def reconstruct_many(
    latents: list[LatentRepresentation],
    model: ProteinAE,
    seed: int,
    n_steps: Optional[int] = None,
) -> list[BackboneStructure]:
    """latent 리스트를 같은 생성기로 함께 디코딩."""
    r = model.config.downsample
    dtype, device = _model_dtype(model), _model_device(model)
    n_pad = padded_length(max(lat.n_res for lat in latents), r)
    n_down_pad = n_pad // r
    z = torch.zeros(len(latents), n_down_pad, latents[0].dim, dtype=dtype, device=device)
    mask = torch.zeros(len(latents), n_pad, dtype=torch.bool, device=device)
    for i, lat in enumerate(latents):
        if lat.n_down != n_downsampled(lat.n_res, r):
            raise ShapeMismatch(f"latent has {lat.n_down} rows, expected ceil({lat.n_res}/{r})")
        z[i, : lat.n_down] = torch.as_tensor(lat.z, dtype=dtype, device=device)
        mask[i, : lat.n_res] = True
    generator = torch.Generator(device=device).manual_seed(seed)
    x = model.sample_from_latent(z, mask, generator, n_steps)
    coords = x.double().cpu().numpy()
    return [BackboneStructure.from_coords(coords[i, : lat.n_res]) for i, lat in enumerate(latents)]


def reconstruct(
    latent: LatentRepresentation,
    model: ProteinAE,
    seed: int,
    n_steps: Optional[int] = None,
) -> BackboneStructure:
    """latent 하나를 구조로 디코딩 (같은 seed → 같은 결과)."""
    return reconstruct_many([latent], model, seed, n_steps)[0]


def latent_stats(latents: list[LatentRepresentation]) -> dict[str, float]:
    """latent 행 전체의 평균/표준편차 (진단 로그용)."""
    rows = np.concatenate([lat.z for lat in latents], axis=0)
    return {"mean": float(rows.mean()), "std": float(rows.std())}
