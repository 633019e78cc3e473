"""PLDM: latent 공간 flow 모델과 SDE 샘플러."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import torch
from scipy.spatial.distance import pdist
from torch import Tensor, nn

from app.settings.constants import Constants
from common.errors import InsufficientSamples, InvalidLength, ShapeMismatch
from domain.value_objects.latent_representation import LatentRepresentation
from modeling.autoencoder import n_downsampled
from modeling.dit_core import DiTConfig, DiTStack
from modeling.featurization import fourier_time_embedding
from modeling.flow import SDEConfig, interpolate, pldm_loss, sde_integrate


@dataclass(frozen=True)
class PLDMConfig:
    """PLDM 하이퍼파라미터."""

    dit: DiTConfig
    latent_dim: int
    downsample: int = 1
    time_embed_dim: int = Constants.TIME_EMBED_DIM
    sde: SDEConfig = field(default_factory=SDEConfig)
    renormalize_samples: bool = False

    def __post_init__(self) -> None:
        """유효성 검증."""
        if self.dit.use_pair_bias:
            raise ShapeMismatch("PLDM trunk runs without pair bias")


class PLDM(nn.Module):
    """Linear(d → D) → DiT (pair bias 없음) → zero-init Linear(D → d)."""

    def __init__(self, config: PLDMConfig) -> None:
        super().__init__()
        self.config = config
        dit = config.dit
        self.in_proj = nn.Linear(config.latent_dim, dit.token_dim)
        self.time_proj = nn.Linear(config.time_embed_dim, dit.c_cond)
        self.trunk = DiTStack(dit)
        self.out_proj = nn.Linear(dit.token_dim, config.latent_dim)
        nn.init.zeros_(self.out_proj.weight)
        nn.init.zeros_(self.out_proj.bias)

    def forward(self, z_t: Tensor, t: Tensor, mask: Optional[Tensor] = None) -> Tensor:
        """velocity 예측.

        Args:
            z_t: (B, Nd, d).
            t: (B,).
            mask: (B, Nd) bool.
        """
        if z_t.shape[-1] != self.config.latent_dim:
            raise ShapeMismatch(f"latent dim {z_t.shape[-1]} != {self.config.latent_dim}")
        batch, n_down = z_t.shape[:2]
        c = self.time_proj(fourier_time_embedding(t.to(z_t.dtype), self.config.time_embed_dim))
        c = c[:, None, :].expand(batch, n_down, -1)
        s = self.trunk(self.in_proj(z_t), c, mask=mask)
        v = self.out_proj(s)
        if mask is not None:
            v = v * mask[..., None].to(v.dtype)
        return v

    def training_loss(
        self,
        z1: Tensor,
        mask: Tensor,
        t: Tensor,
        generator: Optional[torch.Generator] = None,
    ) -> Tensor:
        """한 배치의 latent flow 손실."""
        z0 = torch.randn(z1.shape, generator=generator, dtype=z1.dtype, device=z1.device)
        z0 = z0 * mask[..., None].to(z1.dtype)
        v = self(interpolate(z0, z1, t), t, mask)
        return pldm_loss(v, z1, z0, mask)


def pldm_velocity(z_t: Tensor, t: Tensor, model: PLDM, mask: Optional[Tensor] = None) -> Tensor:
    """함수형 진입점."""
    return model(z_t, t, mask)


@torch.no_grad()
def sample_latents(
    model: PLDM,
    n_res: int,
    n_samples: int,
    seed: int,
    sde: Optional[SDEConfig] = None,
) -> list[LatentRepresentation]:
    """길이 n_res 구조용 latent를 n_samples개 생성.

    Args:
        model: 학습된 PLDM.
        n_res: 목표 구조 길이.
        n_samples: 샘플 수.
        seed: 생성기 시드 (같은 시드 → 같은 결과).
        sde: 샘플러 설정 (None이면 모델 설정).

    Raises:
        InvalidLength: n_res < 1 또는 n_samples < 1.
    """
    if n_res < 1 or n_samples < 1:
        raise InvalidLength(f"n_res and n_samples must be >= 1, got {n_res}, {n_samples}")
    config = model.config
    sde = sde or config.sde
    param = next(model.parameters())
    n_down = n_downsampled(n_res, config.downsample)
    generator = torch.Generator(device=param.device).manual_seed(seed)
    z0 = torch.randn(
        (n_samples, n_down, config.latent_dim), generator=generator, dtype=param.dtype, device=param.device
    )

    def velocity(z: Tensor, t: float) -> Tensor:
        return model(z, torch.full((n_samples,), t, dtype=z.dtype, device=z.device))

    z = sde_integrate(velocity, z0, sde, generator)
    if config.renormalize_samples:
        z = torch.nn.functional.layer_norm(z, (config.latent_dim,))
    return [LatentRepresentation(z=z[i].float().cpu().numpy(), n_res=n_res) for i in range(n_samples)]


def sample_latent(model: PLDM, n_res: int, seed: int, sde: Optional[SDEConfig] = None) -> LatentRepresentation:
    """latent 하나 생성."""
    return sample_latents(model, n_res, 1, seed, sde)[0]


def mean_pairwise_latent_distance(latents: list[LatentRepresentation]) -> float:
    """같은 shape latent끼리의 평균 쌍 유클리드 거리 (flatten 기준, 그룹 간 평균).

    Raises:
        InsufficientSamples: 같은 shape latent가 2개 이상인 그룹이 없을 때.
    """
    groups: dict[tuple[int, int], list[np.ndarray]] = {}
    for latent in latents:
        groups.setdefault(latent.z.shape, []).append(latent.z.reshape(-1))
    per_group = [float(pdist(np.stack(rows)).mean()) for rows in groups.values() if len(rows) >= 2]
    if not per_group:
        raise InsufficientSamples("need >= 2 latents of the same shape")
    return float(np.mean(per_group))
