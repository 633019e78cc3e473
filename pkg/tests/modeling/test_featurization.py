"""입력 특징화 테스트."""
import math

import pytest
import torch

from common.errors import InvalidLength, ModeMismatch, OddSize
from domain.services.geometry import random_rigid_rotation
from modeling.featurization import (
    REF_ATOM_FEATURE_DIM,
    RELPOS_BINS,
    PairConditioner,
    SequenceConditioner,
    build_reference_features,
    fourier_frequencies,
    fourier_time_embedding,
    load_gly_reference,
    rbf_embedding,
    relative_position_one_hot,
)


class TestReferenceFeatures:
    """GLY 참조 특징 테스트."""

    def test_gly_table_order(self) -> None:
        assert tuple(a.name for a in load_gly_reference()) == ("N", "CA", "C", "O")

    def test_shapes_and_indices(self) -> None:
        ref = build_reference_features(3)
        assert ref.n_atoms == 12
        assert ref.n_res == 3
        assert ref.tok_idx.tolist() == [0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2]
        assert ref.ref_space_uid.tolist() == ref.tok_idx.tolist()
        assert ref.atom_features().shape == (12, REF_ATOM_FEATURE_DIM)
        assert ref.residue_features().shape == (3, 4 * REF_ATOM_FEATURE_DIM)

    def test_rows_identical_per_residue(self) -> None:
        """서열과 무관하게 모든 잔기의 특징이 같다."""
        residue = build_reference_features(4).residue_features()
        assert torch.equal(residue[0], residue[3])

    def test_invalid_length(self) -> None:
        with pytest.raises(InvalidLength):
            build_reference_features(0)


class TestTimeEmbedding:
    """Fourier 시간 임베딩 테스트."""

    def test_known_values(self) -> None:
        """주파수 (1, 10), t=0.5 → (sin .5, sin 5, cos .5, cos 5)."""
        assert fourier_frequencies(4, max_frequency=10.0).tolist() == pytest.approx([1.0, 10.0])
        emb = fourier_time_embedding(torch.tensor([0.5], dtype=torch.float64), 4, max_frequency=10.0)
        expected = [math.sin(0.5), math.sin(5.0), math.cos(0.5), math.cos(5.0)]
        assert emb[0].tolist() == pytest.approx(expected, abs=1e-9)

    def test_odd_size(self) -> None:
        with pytest.raises(OddSize):
            fourier_time_embedding(torch.zeros(1), 5)

    def test_batch_shape(self) -> None:
        assert fourier_time_embedding(torch.rand(3), 8).shape == (3, 8)


class TestPairFeatures:
    """pair 특징 테스트."""

    def test_relative_position_clipped(self) -> None:
        seq_idx = torch.arange(50)[None]
        one_hot = relative_position_one_hot(seq_idx, clip=4)
        assert one_hot.shape == (1, 50, 50, 9)
        assert one_hot[0, 0, 49].argmax().item() == 0
        assert one_hot[0, 49, 0].argmax().item() == 8
        assert one_hot[0, 3, 3].argmax().item() == 4

    def test_rbf_peak(self) -> None:
        rbf = rbf_embedding(torch.tensor([0.0]), n_centers=5, d_min=0.0, d_max=4.0, width=1.0)
        assert rbf[0].argmax().item() == 0
        assert rbf[0, 0].item() == pytest.approx(1.0)

    def test_encoder_rejects_time(self) -> None:
        cond = PairConditioner(c_pair=4, time_embed_dim=4, decoder=False)
        x = torch.zeros(1, 3, 3)
        mask = torch.ones(1, 3, dtype=torch.bool)
        with pytest.raises(ModeMismatch):
            cond(x, torch.arange(3)[None], mask, t=torch.zeros(1))

    def test_decoder_requires_time(self) -> None:
        cond = PairConditioner(c_pair=4, time_embed_dim=4, decoder=True)
        with pytest.raises(ModeMismatch):
            cond(torch.zeros(1, 3, 3), torch.arange(3)[None], torch.ones(1, 3, dtype=torch.bool))

    def test_masked_pairs_zero(self) -> None:
        """무효 잔기가 포함된 pair 는 0."""
        cond = PairConditioner(c_pair=4, time_embed_dim=4, decoder=False)
        mask = torch.tensor([[True, True, False]])
        p = cond(torch.randn(1, 3, 3), torch.arange(3)[None], mask)
        assert p.shape == (1, 3, 3, 4)
        assert torch.all(p[0, 2] == 0) and torch.all(p[0, :, 2] == 0)
        assert RELPOS_BINS == 65


class TestSequenceConditioner:
    """잔기 조건 테스트."""

    def test_decoder_adds_latent(self) -> None:
        cond = SequenceConditioner(c_cond=6, time_embed_dim=4, decoder=True)
        ref = build_reference_features(3)
        mask = torch.ones(2, 3, dtype=torch.bool)
        z_up = torch.zeros(2, 3, 6)
        base = cond(ref, mask, t=torch.zeros(2), z_up=z_up)
        shifted = cond(ref, mask, t=torch.zeros(2), z_up=z_up + 1.0)
        assert torch.allclose(shifted - base, torch.ones_like(base))

    def test_encoder_rejects_latent(self) -> None:
        cond = SequenceConditioner(c_cond=6, time_embed_dim=4, decoder=False)
        with pytest.raises(ModeMismatch):
            cond(build_reference_features(2), torch.ones(1, 2, dtype=torch.bool), z_up=torch.zeros(1, 2, 6))


class TestRbfClosedForm:
    """RBF 값이 닫힌 형식과 일치하는지 테스트."""

    def test_matches_gaussian_at_ca_spacing(self) -> None:
        """d = 3.8 Å, 중심 0..20 (16개), 폭 1.25."""
        d = 3.8
        rbf = rbf_embedding(torch.tensor([d], dtype=torch.float64))[0]
        centers = [20.0 * k / 15 for k in range(16)]
        expected = [math.exp(-((d - mu) ** 2) / (2 * 1.25**2)) for mu in centers]
        assert rbf.tolist() == pytest.approx(expected, rel=1e-9, abs=1e-12)
        assert rbf[:5].tolist() == pytest.approx([0.00984, 0.1427, 0.6630, 0.9873, 0.4713], abs=5e-4)

    def test_peak_value_is_one(self) -> None:
        rbf = rbf_embedding(torch.tensor([4.0], dtype=torch.float64))[0]
        assert rbf[3].item() == pytest.approx(1.0)


class TestPairConditionerSymmetry:
    """pair 조건의 순열 등변성과 회전 불변성 테스트."""

    @staticmethod
    def _inputs(n: int = 6) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
        gen = torch.Generator().manual_seed(3)
        x_ca = torch.randn(1, n, 3, generator=gen, dtype=torch.float64) * 5.0
        seq_idx = torch.arange(n)[None]
        mask = torch.ones(1, n, dtype=torch.bool)
        return x_ca, seq_idx, mask

    def test_permutation_equivariant(self) -> None:
        """입력 잔기 순서를 섞으면 출력 pair 도 같은 순서로 섞인다."""
        torch.manual_seed(0)
        cond = PairConditioner(c_pair=5, time_embed_dim=4, decoder=False).double()
        x_ca, seq_idx, mask = self._inputs()
        perm = torch.tensor([3, 0, 5, 1, 4, 2])
        p = cond(x_ca, seq_idx, mask)
        p_perm = cond(x_ca[:, perm], seq_idx[:, perm], mask[:, perm])
        assert torch.allclose(p_perm, p[:, perm][:, :, perm], atol=1e-10)

    def test_encoder_rotation_invariant(self) -> None:
        torch.manual_seed(0)
        cond = PairConditioner(c_pair=5, time_embed_dim=4, decoder=False).double()
        x_ca, seq_idx, mask = self._inputs()
        rotation = torch.from_numpy(random_rigid_rotation(11).rotation)
        p = cond(x_ca, seq_idx, mask)
        p_rot = cond(x_ca @ rotation.T + 7.0, seq_idx, mask)
        assert torch.allclose(p, p_rot, atol=1e-9)

    def test_decoder_rotation_invariant(self) -> None:
        """x_t 와 self-conditioning 을 함께 회전해도 출력이 같다."""
        torch.manual_seed(0)
        cond = PairConditioner(c_pair=5, time_embed_dim=4, decoder=True).double()
        x_ca, seq_idx, mask = self._inputs()
        selfcond = x_ca.flip(1) * 0.5
        rotation = torch.from_numpy(random_rigid_rotation(12).rotation)
        t = torch.tensor([0.3], dtype=torch.float64)
        p = cond(x_ca, seq_idx, mask, t=t, selfcond_ca=selfcond)
        p_rot = cond(x_ca @ rotation.T, seq_idx, mask, t=t, selfcond_ca=selfcond @ rotation.T)
        assert torch.allclose(p, p_rot, atol=1e-9)
