"""합성 backbone 생성 테스트."""
import numpy as np
import pytest

from common.errors import InvalidLength
from domain.services.geometry import kabsch_rmsd
from domain.services.structure_metrics import geometry_validity
from domain.services.synthetic import synth_corpus, synth_helix, synth_random_coil


class TestSynthHelix:
    """이상적 helix 테스트."""

    def test_ideal_helix_is_valid(self) -> None:
        """이상적 helix는 모든 잔기가 기하적으로 유효."""
        helix = synth_helix(30)
        assert geometry_validity(helix).fraction_valid == 1.0

    def test_ca_spacing_and_rise(self) -> None:
        """CA–CA 약 3.8Å, i→i+3 약 5Å."""
        ca = synth_helix(30).ca
        np.testing.assert_allclose(np.linalg.norm(np.diff(ca, axis=0), axis=-1), 3.8, atol=0.1)
        assert 4.5 < np.linalg.norm(ca[3] - ca[0]) < 5.6

    def test_centered(self) -> None:
        coords = synth_helix(12, noise_std=0.2, seed=1).coords
        np.testing.assert_allclose(coords.reshape(-1, 3).mean(axis=0), 0.0, atol=1e-9)

    def test_noise_rmsd_bounded(self) -> None:
        """노이즈 0.1Å 구조와 이상적 구조의 RMSD ≤ 0.3Å."""
        ideal = synth_helix(40)
        noisy = synth_helix(40, seed=0, noise_std=0.1)
        assert kabsch_rmsd(ideal, noisy) <= 0.3

    def test_seed_reproducible(self) -> None:
        a = synth_helix(10, seed=3, noise_std=0.1)
        b = synth_helix(10, seed=3, noise_std=0.1)
        np.testing.assert_array_equal(a.coords, b.coords)

    def test_invalid_length(self) -> None:
        with pytest.raises(InvalidLength):
            synth_helix(0)

    @pytest.mark.parametrize("n_res", [1, 2, 3])
    def test_needs_four_residues(self, n_res: int) -> None:
        """4개 미만은 거부, 4개는 허용."""
        with pytest.raises(InvalidLength):
            synth_helix(n_res)
        assert synth_helix(4).n_res == 4

    def test_coil_needs_four_residues(self) -> None:
        with pytest.raises(InvalidLength):
            synth_random_coil(3, seed=0)


class TestSynthCorpus:
    """합성 코퍼스 테스트."""

    def test_lengths_in_range(self) -> None:
        corpus = synth_corpus(20, 8, 12, 0.0, seed=0)
        assert len(corpus) == 20
        assert all(8 <= s.n_res <= 12 for s in corpus)

    def test_same_seed_same_corpus(self) -> None:
        a = synth_corpus(5, 8, 12, 0.1, seed=2)
        b = synth_corpus(5, 8, 12, 0.1, seed=2)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.coords, y.coords)

    def test_bad_range(self) -> None:
        with pytest.raises(InvalidLength):
            synth_corpus(3, 10, 5, 0.0, seed=0)

    def test_random_coil_has_ideal_bonds(self) -> None:
        """coil도 결합 기하는 이상적."""
        coil = synth_random_coil(20, seed=0)
        assert geometry_validity(coil).fraction_valid == 1.0
        np.testing.assert_allclose(np.linalg.norm(np.diff(coil.ca, axis=0), axis=-1), 3.8, atol=0.1)
