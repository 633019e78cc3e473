"""DiT 블록: AdaLN, pair-bias attention (RoPE), 조건부 transition, register 토큰.

텐서 규약: s (B, N, D), c (B, N, c_cond), p (B, N, N, c_pair),
beta (B, N, N) 가산 bias (0 또는 -1e10), mask (B, N) bool.
"""
from dataclasses import dataclass
from typing import Optional

import torch
import torch.nn.functional as F
from einops import rearrange
from torch import Tensor, nn

from app.settings.constants import Constants
from common.errors import OddHeadDim, ShapeMismatch


@dataclass(frozen=True)
class DiTConfig:
    """DiT 스택 하이퍼파라미터."""

    n_layers: int
    token_dim: int
    n_heads: int
    c_cond: int
    c_pair: int = 0
    n_registers: int = 0
    use_pair_bias: bool = True
    rope_base: float = Constants.ROPE_BASE
    transition_expansion: int = Constants.TRANSITION_EXPANSION

    def __post_init__(self) -> None:
        """유효성 검증."""
        if self.token_dim % self.n_heads != 0:
            raise ShapeMismatch("token_dim must be divisible by n_heads")
        if self.head_dim % 2 != 0:
            raise OddHeadDim(f"head dimension must be even for RoPE, got {self.head_dim}")
        if self.use_pair_bias and self.c_pair < 1:
            raise ShapeMismatch("c_pair must be >= 1 when pair bias is used")

    @property
    def head_dim(self) -> int:
        return self.token_dim // self.n_heads


class AdaptiveLayerNorm(nn.Module):
    """AdaLN(s, c) = sigmoid(Linear(c)) ⊙ LayerNorm(s) + LinearNoBias(c).

    LayerNorm은 학습 파라미터가 없다.
    """

    def __init__(self, dim: int, dim_cond: int) -> None:
        super().__init__()
        self.norm = nn.LayerNorm(dim, elementwise_affine=False)
        self.to_gamma = nn.Linear(dim_cond, dim)
        self.to_beta = nn.Linear(dim_cond, dim, bias=False)

    def forward(self, s: Tensor, c: Tensor) -> Tensor:
        return torch.sigmoid(self.to_gamma(c)) * self.norm(s) + self.to_beta(c)


def rope_frequencies(head_dim: int, base: float = Constants.ROPE_BASE) -> Tensor:
    """(head_dim/2,) 회전 주파수 base^(-2i/head_dim)."""
    if head_dim % 2 != 0:
        raise OddHeadDim(f"head dimension must be even for RoPE, got {head_dim}")
    return base ** (-torch.arange(0, head_dim, 2, dtype=torch.float64) / head_dim)


def _rotate_half(x: Tensor) -> Tensor:
    x1, x2 = x.chunk(2, dim=-1)
    return torch.cat([-x2, x1], dim=-1)


def rope_apply(
    q: Tensor,
    k: Tensor,
    positions: Tensor,
    base: float = Constants.ROPE_BASE,
) -> tuple[Tensor, Tensor]:
    """q, k (B, H, N, head_dim)에 위치별 회전 적용.

    Args:
        q: query.
        k: key.
        positions: (B, N) 또는 (N,) 위치 (실수 허용).
        base: 주파수 밑.

    Returns:
        회전된 (q, k). 각 2차원 쌍의 노름은 보존된다.
    """
    head_dim = q.shape[-1]
    freqs = rope_frequencies(head_dim, base).to(device=q.device)
    if positions.dim() == 1:
        positions = positions[None]
    angles = positions.to(torch.float64)[..., None] * freqs
    angles = torch.cat([angles, angles], dim=-1)[:, None]
    cos = angles.cos().to(q.dtype)
    sin = angles.sin().to(q.dtype)
    return q * cos + _rotate_half(q) * sin, k * cos + _rotate_half(k) * sin


class AttentionPairBias(nn.Module):
    """AdaLN 조건 + pair bias + sigmoid gate multi-head attention.

    출력층은 0, gate bias는 -2로 초기화한다 (초기 잔차 = 항등).
    """

    def __init__(self, config: DiTConfig) -> None:
        super().__init__()
        dim = config.token_dim
        self.n_heads = config.n_heads
        self.head_dim = config.head_dim
        self.rope_base = config.rope_base
        self.adaln = AdaptiveLayerNorm(dim, config.c_cond)
        self.to_q = nn.Linear(dim, dim)
        self.to_k = nn.Linear(dim, dim, bias=False)
        self.to_v = nn.Linear(dim, dim, bias=False)
        self.k_norm = nn.LayerNorm(self.head_dim)
        self.v_norm = nn.LayerNorm(self.head_dim)
        self.to_gate = nn.Linear(dim, dim)
        self.pair_bias = None
        if config.use_pair_bias:
            self.pair_norm = nn.LayerNorm(config.c_pair)
            self.pair_bias = nn.Linear(config.c_pair, config.n_heads, bias=False)
        self.to_out = nn.Linear(dim, dim, bias=False)
        nn.init.zeros_(self.to_out.weight)
        nn.init.zeros_(self.to_gate.weight)
        nn.init.constant_(self.to_gate.bias, Constants.ADALN_ZERO_GATE_BIAS)

    def forward(
        self,
        s: Tensor,
        c: Tensor,
        beta: Tensor,
        p: Optional[Tensor] = None,
        positions: Optional[Tensor] = None,
        rope_mask: Optional[Tensor] = None,
    ) -> Tensor:
        a = self.adaln(s, c)
        split = "b n (h d) -> b h n d"
        q = rearrange(self.to_q(a), split, h=self.n_heads)
        k = self.k_norm(rearrange(self.to_k(a), split, h=self.n_heads))
        v = self.v_norm(rearrange(self.to_v(a), split, h=self.n_heads))
        if positions is not None:
            q_rot, k_rot = rope_apply(q, k, positions, self.rope_base)
            if rope_mask is None:
                q, k = q_rot, k_rot
            else:
                keep = rope_mask[:, None, :, None]
                q = torch.where(keep, q_rot, q)
                k = torch.where(keep, k_rot, k)
        bias = beta[:, None].to(q.dtype)
        if self.pair_bias is not None and p is not None:
            bias = bias + rearrange(self.pair_bias(self.pair_norm(p)), "b i j h -> b h i j")
        logits = torch.einsum("bhid,bhjd->bhij", q, k) / self.head_dim**0.5 + bias
        attn = logits.softmax(dim=-1)
        out = rearrange(torch.einsum("bhij,bhjd->bhid", attn, v), "b h n d -> b n (h d)")
        return self.to_out(torch.sigmoid(self.to_gate(a)) * out)


class ConditionedTransition(nn.Module):
    """AdaLN → SwiGLU → zero-init 출력 × sigmoid(Linear(c)) gate."""

    def __init__(self, config: DiTConfig) -> None:
        super().__init__()
        dim = config.token_dim
        hidden = dim * config.transition_expansion
        self.adaln = AdaptiveLayerNorm(dim, config.c_cond)
        self.to_hidden = nn.Linear(dim, hidden * 2, bias=False)
        self.to_out = nn.Linear(hidden, dim, bias=False)
        self.to_gate = nn.Linear(config.c_cond, dim)
        nn.init.zeros_(self.to_out.weight)
        nn.init.zeros_(self.to_gate.weight)
        nn.init.constant_(self.to_gate.bias, Constants.ADALN_ZERO_GATE_BIAS)

    def forward(self, s: Tensor, c: Tensor) -> Tensor:
        x, gate = self.to_hidden(self.adaln(s, c)).chunk(2, dim=-1)
        return self.to_out(F.silu(gate) * x) * torch.sigmoid(self.to_gate(c))


class DiTBlock(nn.Module):
    """attention + transition, 각각 잔차 연결."""

    def __init__(self, config: DiTConfig) -> None:
        super().__init__()
        self.attention = AttentionPairBias(config)
        self.transition = ConditionedTransition(config)

    def forward(self, s, c, beta, p=None, positions=None, rope_mask=None) -> Tensor:
        s = s + self.attention(s, c, beta, p, positions, rope_mask)
        return s + self.transition(s, c)


def mask_to_beta(mask: Tensor) -> Tensor:
    """(B, N) key 마스크 → (B, N, N) 가산 bias."""
    blocked = ~mask[:, None, :]
    return torch.zeros(blocked.shape, device=mask.device).masked_fill(blocked, Constants.MASK_BIAS)


class DiTStack(nn.Module):
    """register 토큰을 앞에 붙인 DiT 블록 스택.

    register 행/열의 pair 표현과 bias는 0이며 RoPE 회전을 받지 않는다.
    출력은 register를 제거한 (B, N, D).
    """

    def __init__(self, config: DiTConfig) -> None:
        super().__init__()
        self.config = config
        self.registers = nn.Parameter(torch.randn(config.n_registers, config.token_dim) * 0.02)
        self.blocks = nn.ModuleList([DiTBlock(config) for _ in range(config.n_layers)])

    def forward(
        self,
        s: Tensor,
        c: Tensor,
        p: Optional[Tensor] = None,
        beta: Optional[Tensor] = None,
        mask: Optional[Tensor] = None,
        positions: Optional[Tensor] = None,
    ) -> Tensor:
        """스택 실행.

        Args:
            s: (B, N, D) 토큰.
            c: (B, N, c_cond) 조건.
            p: (B, N, N, c_pair) pair 표현 (pair bias 미사용이면 None).
            beta: (B, N, N) 추가 bias (None이면 0).
            mask: (B, N) 유효 토큰 (None이면 전부 유효). 무효 key는 -1e10.
            positions: (B, N) RoPE 위치 (None이면 0..N-1).

        Returns:
            (B, N, D).

        Raises:
            ShapeMismatch: 입력 shape가 맞지 않을 때.
        """
        batch, n_tokens, dim = s.shape
        if dim != self.config.token_dim or c.shape[:2] != (batch, n_tokens):
            raise ShapeMismatch(f"s {tuple(s.shape)} / c {tuple(c.shape)} do not match the stack")
        if p is not None and p.shape[:3] != (batch, n_tokens, n_tokens):
            raise ShapeMismatch(f"p {tuple(p.shape)} does not match s {tuple(s.shape)}")
        device = s.device
        if mask is None:
            mask = torch.ones(batch, n_tokens, dtype=torch.bool, device=device)
        if beta is None:
            beta = torch.zeros(batch, n_tokens, n_tokens, device=device)
        elif beta.shape[-2:] != (n_tokens, n_tokens):
            raise ShapeMismatch(f"beta {tuple(beta.shape)} does not match s {tuple(s.shape)}")
        beta = beta.expand(batch, n_tokens, n_tokens)
        if positions is None:
            positions = torch.arange(n_tokens, device=device)
        positions = positions.to(torch.float64).expand(batch, n_tokens)

        n_reg = self.config.n_registers
        rope_mask = None
        if n_reg:
            s = torch.cat([self.registers.to(s.dtype).expand(batch, n_reg, dim), s], dim=1)
            c = F.pad(c, (0, 0, n_reg, 0))
            beta = F.pad(beta, (n_reg, 0, n_reg, 0))
            mask = torch.cat([torch.ones(batch, n_reg, dtype=torch.bool, device=device), mask.bool()], dim=1)
            if p is not None:
                p = F.pad(p, (0, 0, n_reg, 0, n_reg, 0))
            positions = F.pad(positions, (n_reg, 0))
            rope_mask = torch.ones(batch, n_reg + n_tokens, dtype=torch.bool, device=device)
            rope_mask[:, :n_reg] = False
        beta = beta + mask_to_beta(mask)

        for block in self.blocks:
            s = block(s, c, beta, p, positions, rope_mask)
        return s[:, n_reg:]


def dit_stack(
    s: Tensor,
    c: Tensor,
    p: Optional[Tensor],
    beta: Optional[Tensor],
    stack: DiTStack,
    mask: Optional[Tensor] = None,
    positions: Optional[Tensor] = None,
) -> Tensor:
    """함수형 진입점 (``DiTStack.forward``와 동일)."""
    return stack(s, c, p=p, beta=beta, mask=mask, positions=positions)
