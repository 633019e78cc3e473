"""DiT 블록 테스트 (AdaLN, RoPE, attention, transition, register)."""
import math

import pytest
import torch
from torch import nn

from common.errors import OddHeadDim, ShapeMismatch
from modeling.dit_core import (
    AdaptiveLayerNorm,
    AttentionPairBias,
    ConditionedTransition,
    DiTConfig,
    DiTStack,
    dit_stack,
    mask_to_beta,
    rope_apply,
    rope_frequencies,
)


def _config(**overrides) -> DiTConfig:
    values = dict(n_layers=1, token_dim=8, n_heads=2, c_cond=6, c_pair=4, n_registers=2)
    values.update(overrides)
    return DiTConfig(**values)


class TestAdaptiveLayerNorm:
    """AdaLN 테스트."""

    def test_zero_weights_half_norm(self) -> None:
        """가중치가 0이면 0.5 · LayerNorm(s)."""
        adaln = AdaptiveLayerNorm(4, 3)
        for param in adaln.parameters():
            nn.init.zeros_(param)
        s = torch.randn(2, 5, 4)
        out = adaln(s, torch.randn(2, 5, 3))
        expected = 0.5 * nn.functional.layer_norm(s, (4,))
        assert torch.allclose(out, expected, atol=1e-6)

    def test_gradcheck(self) -> None:
        torch.manual_seed(0)
        adaln = AdaptiveLayerNorm(4, 3).double()
        s = torch.randn(1, 3, 4, dtype=torch.float64, requires_grad=True)
        c = torch.randn(1, 3, 3, dtype=torch.float64, requires_grad=True)
        assert torch.autograd.gradcheck(adaln, (s, c))


class TestRoPE:
    """회전 위치 임베딩 테스트."""

    def test_head_dim_two_rotates_by_position(self) -> None:
        """head_dim 2, 위치 1 → 1 rad 회전."""
        q = torch.tensor([1.0, 0.0], dtype=torch.float64).reshape(1, 1, 1, 2)
        q_rot, _ = rope_apply(q, q.clone(), torch.tensor([1.0]))
        assert q_rot.flatten().tolist() == pytest.approx([math.cos(1.0), math.sin(1.0)])

    def test_norm_preserved(self) -> None:
        q = torch.randn(2, 2, 5, 8, dtype=torch.float64)
        k = torch.randn(2, 2, 5, 8, dtype=torch.float64)
        q_rot, k_rot = rope_apply(q, k, torch.arange(5))
        assert torch.allclose(q_rot.norm(dim=-1), q.norm(dim=-1))
        assert torch.allclose(k_rot.norm(dim=-1), k.norm(dim=-1))

    def test_relative_positions(self) -> None:
        """q·k 는 위치 차이에만 의존."""
        q = torch.randn(1, 1, 1, 4, dtype=torch.float64)
        k = torch.randn(1, 1, 1, 4, dtype=torch.float64)
        a_q, _ = rope_apply(q, q, torch.tensor([3.0]))
        _, a_k = rope_apply(k, k, torch.tensor([1.0]))
        b_q, _ = rope_apply(q, q, torch.tensor([7.0]))
        _, b_k = rope_apply(k, k, torch.tensor([5.0]))
        assert (a_q * a_k).sum().item() == pytest.approx((b_q * b_k).sum().item())

    def test_odd_head_dim(self) -> None:
        with pytest.raises(OddHeadDim):
            rope_frequencies(3)


class TestConditionedTransition:
    """조건부 transition 테스트."""

    def test_zero_input_gives_zero(self) -> None:
        transition = ConditionedTransition(_config())
        out = transition(torch.zeros(1, 4, 8), torch.zeros(1, 4, 6))
        assert torch.equal(out, torch.zeros(1, 4, 8))

    def test_zero_init_output(self) -> None:
        """초기화 직후 출력은 0 (잔차가 항등)."""
        transition = ConditionedTransition(_config())
        out = transition(torch.randn(2, 4, 8), torch.randn(2, 4, 6))
        assert torch.all(out == 0)


class TestDiTConfig:
    """설정 검증 테스트."""

    def test_odd_head_dim(self) -> None:
        with pytest.raises(OddHeadDim):
            _config(token_dim=6, n_heads=2)

    def test_indivisible(self) -> None:
        with pytest.raises(ShapeMismatch):
            _config(token_dim=8, n_heads=3)

    def test_pair_bias_needs_channels(self) -> None:
        with pytest.raises(ShapeMismatch):
            _config(c_pair=0)


class TestDiTStack:
    """DiT 스택 테스트."""

    def test_output_excludes_registers(self) -> None:
        stack = DiTStack(_config(n_registers=3))
        out = stack(torch.randn(2, 5, 8), torch.randn(2, 5, 6), p=torch.randn(2, 5, 5, 4))
        assert out.shape == (2, 5, 8)

    def test_masked_keys_do_not_leak(self) -> None:
        """무효 토큰 값을 바꿔도 유효 토큰 출력은 같다."""
        torch.manual_seed(0)
        stack = DiTStack(_config(n_layers=2))
        s = torch.randn(1, 5, 8)
        c = torch.randn(1, 5, 6)
        p = torch.randn(1, 5, 5, 4)
        mask = torch.tensor([[True, True, True, False, False]])
        s2 = s.clone()
        s2[:, 3:] = 100.0
        out1 = stack(s, c, p=p, mask=mask)
        out2 = stack(s2, c, p=p, mask=mask)
        assert torch.allclose(out1[:, :3], out2[:, :3], atol=1e-5)

    def test_without_pair_bias(self) -> None:
        stack = DiTStack(_config(use_pair_bias=False, c_pair=0, n_registers=0))
        assert dit_stack(torch.randn(1, 3, 8), torch.randn(1, 3, 6), None, None, stack).shape == (1, 3, 8)

    def test_shape_mismatch(self) -> None:
        stack = DiTStack(_config())
        with pytest.raises(ShapeMismatch):
            stack(torch.randn(1, 3, 8), torch.randn(1, 4, 6))

    def test_mask_to_beta(self) -> None:
        beta = mask_to_beta(torch.tensor([[True, False]]))
        assert beta[0, 0, 0].item() == 0.0
        assert beta[0, 1, 1].item() == -1e10

    def test_gradcheck_float64(self) -> None:
        torch.manual_seed(0)
        stack = DiTStack(DiTConfig(n_layers=1, token_dim=4, n_heads=2, c_cond=3, c_pair=2, n_registers=1)).double()
        # 잔차 경로만 남지 않도록 zero-init 출력을 흔든다
        for param in stack.parameters():
            param.data.add_(0.1 * torch.randn_like(param))
        s = torch.randn(1, 3, 4, dtype=torch.float64, requires_grad=True)
        c = torch.randn(1, 3, 3, dtype=torch.float64)
        p = torch.randn(1, 3, 3, 2, dtype=torch.float64)
        assert torch.autograd.gradcheck(lambda x: stack(x, c, p=p), (s,))


class TestAttentionInit:
    """attention 초기화 테스트."""

    def test_zero_output_and_closed_gate(self) -> None:
        """출력층 0, gate bias -2 → 초기 잔차 기여 0."""
        attention = AttentionPairBias(_config())
        assert torch.all(attention.to_out.weight == 0)
        assert torch.all(attention.to_gate.bias == -2.0)
        s = torch.randn(2, 4, 8)
        out = attention(s, torch.randn(2, 4, 6), torch.zeros(2, 4, 4), p=torch.randn(2, 4, 4, 4))
        assert torch.all(out == 0)

    def test_stack_is_identity_at_init(self) -> None:
        stack = DiTStack(_config(n_layers=2))
        s = torch.randn(1, 5, 8)
        out = stack(s, torch.randn(1, 5, 6), p=torch.randn(1, 5, 5, 4))
        assert torch.equal(out, s)


class TestRoPEShiftInvariance:
    """RoPE 위치를 일정하게 평행이동해도 출력이 같은지 테스트."""

    def test_shift_positions(self) -> None:
        torch.manual_seed(0)
        stack = DiTStack(_config(n_layers=2, use_pair_bias=False, c_pair=0, n_registers=0)).double()
        for param in stack.parameters():
            param.data.add_(0.2 * torch.randn_like(param))
        s = torch.randn(1, 7, 8, dtype=torch.float64)
        c = torch.randn(1, 7, 6, dtype=torch.float64)
        positions = torch.arange(7)
        out = stack(s, c, positions=positions)
        shifted = stack(s, c, positions=positions + 37)
        assert torch.allclose(out, shifted, atol=1e-4)
        assert not torch.allclose(out, s)

    def test_reversed_positions_differ(self) -> None:
        """위치 순서 자체는 출력에 반영된다."""
        torch.manual_seed(0)
        stack = DiTStack(_config(use_pair_bias=False, c_pair=0, n_registers=0)).double()
        for param in stack.parameters():
            param.data.add_(0.2 * torch.randn_like(param))
        s = torch.randn(1, 5, 8, dtype=torch.float64)
        c = torch.randn(1, 5, 6, dtype=torch.float64)
        out = stack(s, c, positions=torch.arange(5))
        flipped = stack(s, c, positions=torch.arange(5).flip(0))
        assert not torch.allclose(out, flipped, atol=1e-6)
