"""원자 단위 attention 테스트."""
import numpy as np
import pytest
import torch

from common.errors import ShapeMismatch
from modeling.atom_attention import (
    AllAtomDecoder,
    AllAtomEncoder,
    LocalWindow,
    atom_decoder,
    atom_encoder,
    local_attention_mask,
    residue_to_atom_mask,
)
from modeling.featurization import build_reference_features

WINDOW = LocalWindow(n_queries=4, n_keys=8)


class TestLocalAttentionMask:
    """국소 attention 마스크 테스트."""

    def test_default_window_values(self) -> None:
        """기본 창 (32, 128): (0,0) 허용, (0,200) 차단."""
        beta = local_attention_mask(256)
        assert beta[0, 0].item() == 0.0
        assert beta[0, 200].item() == -1e10

    def test_single_block_is_open(self) -> None:
        """32개 원자 이하는 전부 허용."""
        assert torch.all(local_attention_mask(32) == 0)

    def test_window_is_local(self) -> None:
        beta = local_attention_mask(16, WINDOW)
        # 쿼리 0..3 의 중심 1.5, 키 허용 범위 |m - 1.5| < 4
        assert beta[0, 5].item() == 0.0
        assert beta[0, 6].item() == -1e10


class TestAtomEncoderDecoder:
    """all-atom 인코더/디코더 테스트."""

    @pytest.fixture
    def modules(self) -> tuple[AllAtomEncoder, AllAtomDecoder]:
        torch.manual_seed(0)
        encoder = AllAtomEncoder(8, 4, c_token=16, c_cond=6, c_pair=5, n_layers=1, n_heads=2, window=WINDOW)
        decoder = AllAtomDecoder(8, 4, c_token=16, n_layers=1, n_heads=2, window=WINDOW)
        return encoder, decoder

    def test_shapes(self, modules: tuple[AllAtomEncoder, AllAtomDecoder]) -> None:
        encoder, decoder = modules
        n_res = 5
        x = torch.randn(2, n_res, 4, 3)
        mask = torch.ones(2, n_res, dtype=torch.bool)
        s, skip = atom_encoder(
            x, build_reference_features(n_res), torch.randn(2, n_res, 6), torch.randn(2, n_res, n_res, 5), mask, encoder
        )
        assert s.shape == (2, n_res, 16)
        assert skip.q.shape == (2, 4 * n_res, 8)
        assert skip.p.shape == (2, 4 * n_res, 4 * n_res, 4)
        v = atom_decoder(s, skip, mask, decoder)
        assert v.shape == (2, n_res, 4, 3)

    def test_masked_residues_have_zero_velocity(self, modules: tuple[AllAtomEncoder, AllAtomDecoder]) -> None:
        encoder, decoder = modules
        mask = torch.tensor([[True, True, True, False]])
        s, skip = encoder(torch.randn(1, 4, 4, 3), build_reference_features(4), torch.randn(1, 4, 6),
                          torch.randn(1, 4, 4, 5), mask)
        v = decoder(s, skip, mask)
        assert torch.all(v[0, 3] == 0)

    def test_reference_length_mismatch(self, modules: tuple[AllAtomEncoder, AllAtomDecoder]) -> None:
        encoder, _ = modules
        with pytest.raises(ShapeMismatch):
            encoder(torch.randn(1, 4, 4, 3), build_reference_features(3), torch.randn(1, 4, 6),
                    torch.randn(1, 4, 4, 5), torch.ones(1, 4, dtype=torch.bool))

    def test_residue_to_atom_mask(self) -> None:
        mask = residue_to_atom_mask(torch.tensor([[True, False]]))
        assert mask.tolist() == [[True] * 4 + [False] * 4]


def _block_window_allowed(n_atoms: int, n_queries: int, n_keys: int) -> np.ndarray:
    """쿼리 블록별로 허용 키 구간을 직접 나열한 기준 마스크."""
    allowed = np.zeros((n_atoms, n_atoms), dtype=bool)
    for l in range(n_atoms):
        centre = (l // n_queries) * n_queries + n_queries / 2 - 0.5
        for m in range(n_atoms):
            allowed[l, m] = abs(m - centre) < n_keys / 2
    return allowed


class TestLocalAttentionMaskEnumeration:
    """국소 마스크를 직접 나열한 기준과 비교하는 테스트."""

    @pytest.mark.parametrize("n_atoms", [1, 5, 32, 33, 127, 300])
    def test_matches_enumeration(self, n_atoms: int) -> None:
        beta = local_attention_mask(n_atoms).numpy()
        np.testing.assert_array_equal(beta == 0, _block_window_allowed(n_atoms, 32, 128))

    @pytest.mark.parametrize("n_atoms", [500, 1024])
    def test_matches_closed_interval(self, n_atoms: int) -> None:
        """쿼리 블록 k 의 허용 키는 [32k - 48, 32k + 79]."""
        beta = local_attention_mask(n_atoms).numpy()
        rows = np.arange(n_atoms)[:, None]
        cols = np.arange(n_atoms)[None, :]
        start = (rows // 32) * 32
        expected = (cols >= start - 48) & (cols <= start + 79)
        np.testing.assert_array_equal(beta == 0, expected)

    @pytest.mark.parametrize("n_atoms", [1, 33, 500, 1024])
    def test_rows_contiguous_and_bounded(self, n_atoms: int) -> None:
        """각 행의 허용 키는 하나의 연속 구간, 길이 1..128."""
        allowed = local_attention_mask(n_atoms).numpy() == 0
        for row in allowed:
            idx = np.flatnonzero(row)
            assert 1 <= idx.size <= 128
            assert idx[-1] - idx[0] + 1 == idx.size
        assert np.all(allowed.diagonal())

    def test_blocked_value(self) -> None:
        beta = local_attention_mask(1024).numpy()
        assert set(np.unique(beta).tolist()) == {0.0, -1e10}


class TestAtomSeeding:
    """원자 표현 초기화 테스트."""

    def test_pair_mlp_has_two_layers(self) -> None:
        encoder = AllAtomEncoder(8, 4, c_token=16, c_cond=6, c_pair=5, n_layers=1, n_heads=2, window=WINDOW)
        linears = [m for m in encoder.pair_mlp.modules() if isinstance(m, torch.nn.Linear)]
        assert len(linears) == 2
        assert all(m.bias is None for m in linears)

    def test_atom_tokens_follow_residue_condition(self) -> None:
        """잔기 조건이 바뀌면 transformer 이전 원자 토큰 q 도 바뀐다."""
        torch.manual_seed(0)
        encoder = AllAtomEncoder(8, 4, c_token=16, c_cond=6, c_pair=5, n_layers=1, n_heads=2, window=WINDOW)
        ref = build_reference_features(3)
        x = torch.randn(1, 3, 4, 3)
        p_tok = torch.randn(1, 3, 3, 5)
        rep_a = encoder.seed_atoms(x, ref, torch.randn(1, 3, 6), p_tok)
        rep_b = encoder.seed_atoms(x, ref, torch.randn(1, 3, 6), p_tok)
        assert not torch.allclose(rep_a.q, rep_b.q)
        assert torch.allclose(rep_a.q - rep_a.c, rep_b.q - rep_b.c, atol=1e-6)


class TestAtomGradients:
    """인코더 → 디코더 유한 차분 gradient 테스트."""

    def test_gradcheck_float64(self) -> None:
        torch.manual_seed(0)
        window = LocalWindow(n_queries=4, n_keys=8)
        encoder = AllAtomEncoder(4, 2, c_token=4, c_cond=3, c_pair=2, n_layers=1, n_heads=1, window=window).double()
        decoder = AllAtomDecoder(4, 2, c_token=4, n_layers=1, n_heads=1, window=window).double()
        # zero-init 출력층을 흔들어 attention 경로도 검사한다
        for module in (encoder, decoder):
            for param in module.parameters():
                param.data.add_(0.1 * torch.randn_like(param))
        n_res = 3
        ref = build_reference_features(n_res)
        c_tok = torch.randn(1, n_res, 3, dtype=torch.float64)
        p_tok = torch.randn(1, n_res, n_res, 2, dtype=torch.float64)
        mask = torch.ones(1, n_res, dtype=torch.bool)

        def round_trip(x: torch.Tensor) -> torch.Tensor:
            s, skip = encoder(x, ref, c_tok, p_tok, mask)
            return decoder(s, skip, mask)

        x = torch.randn(1, n_res, 4, 3, dtype=torch.float64, requires_grad=True)
        assert torch.autograd.gradcheck(round_trip, (x,))
