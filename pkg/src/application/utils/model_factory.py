"""설정 → 모델 구성, 모델 ↔ 체크포인트 변환.

체크포인트 메타데이터는 ``kind``, ``step``, ``config`` (RunConfig JSON),
``config_hash``를 담는다. PLDM 체크포인트는 추가로 ``ae_checkpoint_id``를
담아 어떤 autoencoder의 latent로 학습했는지 기록한다.
"""
from typing import Any, Literal, Optional

import numpy as np
import torch
from pydantic import ValidationError as PydanticValidationError
from torch import nn

from app.settings.config import (
    AutoencoderSettings,
    DiTSettings,
    PLDMSettings,
    RunConfig,
    SDESettings,
    TimeSamplerSettings,
    config_hash,
)
from application.ports.checkpoint_store import CheckpointPayload
from common.errors import CheckpointError, CheckpointMismatch
from modeling.atom_attention import LocalWindow
from modeling.autoencoder import AutoencoderConfig, ProteinAE
from modeling.dit_core import DiTConfig
from modeling.flow import SDEConfig, TimeSamplerConfig
from modeling.pldm import PLDM, PLDMConfig

CheckpointKind = Literal["autoencoder", "pldm"]


def dit_config(settings: DiTSettings, use_pair_bias: bool = True) -> DiTConfig:
    """DiTSettings → DiTConfig."""
    return DiTConfig(
        n_layers=settings.n_layers,
        token_dim=settings.token_dim,
        n_heads=settings.n_heads,
        c_cond=settings.c_cond,
        c_pair=settings.c_pair if use_pair_bias else 0,
        n_registers=settings.n_registers,
        use_pair_bias=use_pair_bias,
    )


def autoencoder_config(settings: AutoencoderSettings) -> AutoencoderConfig:
    """AutoencoderSettings → AutoencoderConfig."""
    return AutoencoderConfig(
        dit=dit_config(settings.dit),
        latent_dim=settings.latent_dim,
        downsample=settings.downsample,
        ode_steps=settings.ode_steps,
        time_embed_dim=settings.time_embed_dim,
        c_atom=settings.c_atom,
        c_atompair=settings.c_atompair,
        atom_layers=settings.atom_layers,
        atom_heads=settings.atom_heads,
        window=LocalWindow(n_queries=settings.n_queries, n_keys=settings.n_keys),
        self_cond_prob=settings.self_cond_prob,
    )


def sde_config(settings: SDESettings, gamma: Optional[float] = None) -> SDEConfig:
    """SDESettings → SDEConfig (gamma 덮어쓰기 가능)."""
    return SDEConfig(
        gamma=settings.gamma if gamma is None else gamma,
        n_steps=settings.n_steps,
        g_schedule=settings.g_schedule,
        t_clamp_eps=settings.t_clamp_eps,
    )


def time_sampler_config(settings: TimeSamplerSettings) -> TimeSamplerConfig:
    """TimeSamplerSettings → TimeSamplerConfig."""
    return TimeSamplerConfig(
        uniform_weight=settings.uniform_weight,
        beta_a=settings.beta_a,
        beta_b=settings.beta_b,
    )


def pldm_config(settings: PLDMSettings, latent_dim: int, downsample: int) -> PLDMConfig:
    """PLDMSettings + autoencoder의 (d, r) → PLDMConfig."""
    return PLDMConfig(
        dit=dit_config(settings.dit, use_pair_bias=False),
        latent_dim=latent_dim,
        downsample=downsample,
        time_embed_dim=settings.time_embed_dim,
        sde=sde_config(settings.sde),
        renormalize_samples=settings.renormalize_samples,
    )


def build_autoencoder(config: RunConfig, seed: int) -> ProteinAE:
    """시드 고정 초기화된 ProteinAE."""
    torch.manual_seed(seed)
    return ProteinAE(autoencoder_config(config.model.autoencoder)).to(config.train.device)


def build_pldm(config: RunConfig, seed: int) -> PLDM:
    """시드 고정 초기화된 PLDM (latent 차원/다운샘플은 autoencoder 설정을 따른다)."""
    ae = config.model.autoencoder
    torch.manual_seed(seed)
    return PLDM(pldm_config(config.model.pldm, ae.latent_dim, ae.downsample)).to(config.train.device)


def model_to_payload(
    model: nn.Module,
    kind: CheckpointKind,
    config: RunConfig,
    step: int,
    extra: Optional[dict[str, Any]] = None,
) -> CheckpointPayload:
    """모델 state_dict → CheckpointPayload."""
    tensors = {
        name: value.detach().float().cpu().numpy()
        for name, value in model.state_dict().items()
    }
    metadata: dict[str, Any] = {
        "kind": kind,
        "step": step,
        "config": config.model_dump(mode="json"),
        "config_hash": config_hash(config),
    }
    metadata.update(extra or {})
    return CheckpointPayload(tensors=tensors, metadata=metadata)


def load_state(model: nn.Module, tensors: dict[str, np.ndarray]) -> None:
    """이름/shape이 정확히 일치할 때만 state_dict 적재.

    Raises:
        CheckpointMismatch: 누락/초과 이름 또는 shape 불일치.
    """
    state = model.state_dict()
    missing = sorted(set(state) - set(tensors))
    unexpected = sorted(set(tensors) - set(state))
    if missing or unexpected:
        raise CheckpointMismatch(f"tensor names differ (missing={missing[:5]}, unexpected={unexpected[:5]})")
    for name, value in state.items():
        if tuple(tensors[name].shape) != tuple(value.shape):
            raise CheckpointMismatch(
                f"{name}: checkpoint shape {tuple(tensors[name].shape)} != model {tuple(value.shape)}"
            )
    model.load_state_dict(
        {name: torch.from_numpy(array).to(state[name].dtype) for name, array in tensors.items()}
    )


def _config_from_payload(payload: CheckpointPayload, kind: CheckpointKind) -> RunConfig:
    if payload.metadata.get("kind") != kind:
        raise CheckpointMismatch(f"expected a {kind} checkpoint, got {payload.metadata.get('kind')!r}")
    try:
        return RunConfig.model_validate(payload.metadata["config"])
    except (KeyError, PydanticValidationError) as e:
        raise CheckpointError(f"체크포인트 설정을 해석할 수 없습니다: {e}") from e


def autoencoder_from_payload(payload: CheckpointPayload, device: str = "cpu") -> tuple[ProteinAE, RunConfig]:
    """체크포인트 → (eval 모드 ProteinAE, 학습 당시 RunConfig)."""
    config = _config_from_payload(payload, "autoencoder")
    model = ProteinAE(autoencoder_config(config.model.autoencoder))
    load_state(model, payload.tensors)
    return model.to(device).eval(), config


def pldm_from_payload(payload: CheckpointPayload, device: str = "cpu") -> tuple[PLDM, RunConfig]:
    """체크포인트 → (eval 모드 PLDM, 학습 당시 RunConfig)."""
    config = _config_from_payload(payload, "pldm")
    ae = config.model.autoencoder
    model = PLDM(pldm_config(config.model.pldm, ae.latent_dim, ae.downsample))
    load_state(model, payload.tensors)
    return model.to(device).eval(), config
