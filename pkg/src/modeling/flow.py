"""Flow matching 연산: t 샘플러, 선형 경로, 손실, velocity→score, SDE/ODE 스텝.

시간 규약: t=0 노이즈, t=1 데이터. x_t = (1 - t)·x0 + t·x1, 목표 속도 x1 - x0.
"""
from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np
import torch
from torch import Tensor

from app.settings.constants import Constants
from common.errors import EmptyMask, InvalidLength, ShapeMismatch

GSchedule = Literal["one_minus_t", "constant", "zero"]

G_SCHEDULES: dict[str, Callable[[float], float]] = {
    "one_minus_t": lambda t: 1.0 - t,
    "constant": lambda t: 1.0,
    "zero": lambda t: 0.0,
}
"""확산 계수 g(t) 스케줄."""


@dataclass(frozen=True)
class TimeSamplerConfig:
    """p(t) = w·U(0,1) + (1-w)·Beta(a, b)."""

    uniform_weight: float = Constants.TIME_UNIFORM_WEIGHT
    beta_a: float = Constants.TIME_BETA_A
    beta_b: float = Constants.TIME_BETA_B


@dataclass(frozen=True)
class SDEConfig:
    """샘플러 설정."""

    gamma: float = Constants.SDE_GAMMA
    n_steps: int = Constants.SDE_STEPS
    g_schedule: GSchedule = "one_minus_t"
    t_clamp_eps: float = Constants.SDE_T_CLAMP_EPS


def sample_t(
    n: int,
    rng: np.random.Generator | int,
    config: TimeSamplerConfig = TimeSamplerConfig(),
) -> np.ndarray:
    """혼합 분포에서 t를 n개 샘플링.

    Args:
        n: 샘플 수.
        rng: numpy Generator 또는 시드.
        config: 혼합 분포 설정.

    Returns:
        (n,) float64, 값은 [0, 1].
    """
    if n < 0:
        raise InvalidLength(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(rng)
    use_uniform = rng.random(n) < config.uniform_weight
    uniform = rng.random(n)
    beta = rng.beta(config.beta_a, config.beta_b, size=n)
    return np.where(use_uniform, uniform, beta)


def interpolate(x0: Tensor, x1: Tensor, t: Tensor | float) -> Tensor:
    """x_t = (1 - t)·x0 + t·x1. t는 스칼라 또는 (B,) (뒤 차원으로 broadcast)."""
    if x0.shape != x1.shape:
        raise ShapeMismatch(f"x0 {tuple(x0.shape)} and x1 {tuple(x1.shape)} differ")
    if isinstance(t, Tensor) and t.dim() > 0:
        t = t.reshape(t.shape + (1,) * (x0.dim() - t.dim()))
    return (1.0 - t) * x0 + t * x1


def _per_item_mean_square(residual: Tensor, mask: Tensor, per_row: int) -> Tensor:
    """마스크된 항목별 Σ‖·‖² / (per_row · n_valid), (B,) 반환."""
    if residual.shape[: mask.dim()] != mask.shape:
        raise ShapeMismatch(f"mask {tuple(mask.shape)} does not match residual {tuple(residual.shape)}")
    n_valid = mask.sum(dim=1)
    if bool((n_valid == 0).any()):
        raise EmptyMask("every item needs at least one unmasked row")
    weights = mask.to(residual.dtype).reshape(mask.shape + (1,) * (residual.dim() - mask.dim()))
    squared = (residual**2 * weights).flatten(1).sum(dim=1)
    return squared / (per_row * n_valid.to(residual.dtype))


def reconstruction_loss(v_pred: Tensor, x1: Tensor, x0: Tensor, mask: Optional[Tensor] = None) -> Tensor:
    """구조 flow 손실: 1/(4·n) Σ_i Σ_atom ‖v - (x1 - x0)‖², 배치 평균.

    Args:
        v_pred: (B, N, 4, 3) 또는 (N, 4, 3).
        x1: 데이터.
        x0: 노이즈.
        mask: (B, N) 또는 (N,) 유효 잔기 (None이면 전부).

    Raises:
        EmptyMask: 유효 잔기가 없는 항목이 있을 때.
    """
    if v_pred.dim() == 3:
        v_pred, x1, x0 = v_pred[None], x1[None], x0[None]
        mask = None if mask is None else mask[None]
    if mask is None:
        mask = torch.ones(v_pred.shape[:2], dtype=torch.bool, device=v_pred.device)
    residual = v_pred - (x1 - x0)
    return _per_item_mean_square(residual, mask.bool(), Constants.ATOMS_PER_RESIDUE).mean()


def pldm_loss(v_pred: Tensor, z1: Tensor, z0: Tensor, mask: Optional[Tensor] = None) -> Tensor:
    """latent flow 손실: 1/n_down Σ_i ‖v_i - (z1_i - z0_i)‖², 배치 평균."""
    if v_pred.dim() == 2:
        v_pred, z1, z0 = v_pred[None], z1[None], z0[None]
        mask = None if mask is None else mask[None]
    if mask is None:
        mask = torch.ones(v_pred.shape[:2], dtype=torch.bool, device=v_pred.device)
    residual = v_pred - (z1 - z0)
    return _per_item_mean_square(residual, mask.bool(), 1).mean()


def velocity_to_score(
    v: Tensor,
    z_t: Tensor,
    t: float,
    eps: float = Constants.SDE_T_CLAMP_EPS,
) -> Tensor:
    """선형 경로의 velocity → score: -(z_t - t·v) / max(1 - t, eps)."""
    return -(z_t - t * v) / max(1.0 - t, eps)


def sde_step(
    z_t: Tensor,
    t: float,
    dt: float,
    v: Tensor,
    config: SDEConfig,
    generator: Optional[torch.Generator] = None,
) -> Tensor:
    """Euler–Maruyama 한 스텝.

    dz = [v + γ·g(t)·s]·dt + √(2·γ·g(t))·dW. γ = 0 이면 z + v·dt 와 비트 단위로 같다.

    Args:
        z_t: 현재 상태.
        t: 현재 시간.
        dt: 스텝 크기 (> 0).
        v: 현재 velocity 예측.
        config: 샘플러 설정.
        generator: 노이즈 생성기.
    """
    g = G_SCHEDULES[config.g_schedule](t)
    if config.gamma == 0.0 or g == 0.0:
        return z_t + v * dt
    strength = config.gamma * g
    score = velocity_to_score(v, z_t, t, config.t_clamp_eps)
    noise = torch.randn(z_t.shape, generator=generator, dtype=z_t.dtype, device=z_t.device)
    return z_t + (v + strength * score) * dt + (2.0 * strength * dt) ** 0.5 * noise


def time_grid(n_steps: int) -> list[float]:
    """[0, 1] 균등 격자 (n_steps + 1 점)."""
    if n_steps < 1:
        raise InvalidLength(f"n_steps must be >= 1, got {n_steps}")
    return [i / n_steps for i in range(n_steps + 1)]


def euler_integrate(
    velocity_fn: Callable[[Tensor, float, Optional[Tensor]], Tensor],
    x0: Tensor,
    n_steps: int,
    self_condition: bool = True,
) -> Tensor:
    """t: 0 → 1 Euler ODE 적분.

    Args:
        velocity_fn: (x_t, t, x̂) → v. x̂는 이전 스텝의 데이터 추정 (첫 스텝 None).
        x0: 초기 노이즈.
        n_steps: 스텝 수.
        self_condition: True면 x̂ = x_t + (1 - t)·v 를 다음 스텝에 전달.

    Returns:
        t = 1 에서의 상태.
    """
    grid = time_grid(n_steps)
    x = x0
    estimate: Optional[Tensor] = None
    for t, t_next in zip(grid[:-1], grid[1:]):
        v = velocity_fn(x, t, estimate)
        if self_condition:
            estimate = (x + (1.0 - t) * v).detach()
        x = x + (t_next - t) * v
    return x


def sde_integrate(
    velocity_fn: Callable[[Tensor, float], Tensor],
    z0: Tensor,
    config: SDEConfig,
    generator: Optional[torch.Generator] = None,
) -> Tensor:
    """t: 0 → 1 SDE 적분 (config.n_steps 스텝)."""
    grid = time_grid(config.n_steps)
    z = z0
    for t, t_next in zip(grid[:-1], grid[1:]):
        z = sde_step(z, t, t_next - t, velocity_fn(z, t), config, generator)
    return z
