"""강체 기하 연산 테스트."""
import numpy as np
import pytest
from scipy import optimize
from scipy.spatial.transform import Rotation

from common.errors import EmptyChain, EmptyOverlap, ShapeMismatch
from domain.entities.backbone_structure import BackboneStructure
from domain.services.geometry import (
    align_structure,
    center_structure,
    kabsch_rmsd,
    random_rigid_rotation,
    random_rotation,
    superpose,
)
from domain.services.synthetic import synth_helix, synth_random_coil


@pytest.fixture
def helix() -> BackboneStructure:
    return synth_helix(20)


class TestCenterStructure:
    """중심화 테스트."""

    def test_centroid_at_origin(self, helix: BackboneStructure) -> None:
        shifted = helix.with_coords(helix.coords + np.array([5.0, -3.0, 2.0]))
        centered = center_structure(shifted)
        np.testing.assert_allclose(centered.coords.reshape(-1, 3).mean(axis=0), 0.0, atol=1e-9)

    def test_masked_residues_ignored(self) -> None:
        """마스크된 잔기는 중심 계산에서 제외."""
        coords = np.ones((3, 4, 3))
        coords[2] = 100.0
        structure = BackboneStructure(coords, np.arange(3), np.array([True, True, False]))
        centered = center_structure(structure)
        np.testing.assert_allclose(centered.coords[:2], 0.0, atol=1e-12)

    def test_all_masked(self) -> None:
        structure = BackboneStructure(np.zeros((2, 4, 3)), np.arange(2), np.zeros(2, bool))
        with pytest.raises(EmptyChain):
            center_structure(structure)


class TestRandomRotation:
    """랜덤 회전 테스트."""

    def test_same_seed_same_rotation(self) -> None:
        np.testing.assert_array_equal(random_rigid_rotation(3).rotation, random_rigid_rotation(3).rotation)

    def test_rotation_is_proper(self) -> None:
        rotation = random_rigid_rotation(11).rotation
        assert np.isclose(np.linalg.det(rotation), 1.0)

    def test_rotation_preserves_internal_distances(self, helix: BackboneStructure) -> None:
        rotated = random_rotation(helix, 5)
        before = np.linalg.norm(np.diff(helix.ca, axis=0), axis=-1)
        after = np.linalg.norm(np.diff(rotated.ca, axis=0), axis=-1)
        np.testing.assert_allclose(before, after, atol=1e-9)


class TestKabsch:
    """Kabsch 정렬/RMSD 테스트."""

    def test_superpose_recovers_transform(self, helix: BackboneStructure) -> None:
        transform = random_rigid_rotation(1)
        target = transform.apply(helix.ca) + np.array([1.0, 2.0, 3.0])
        fitted = superpose(helix.ca, target)
        np.testing.assert_allclose(fitted.apply(helix.ca), target, atol=1e-6)

    def test_rmsd_invariant_to_rigid_motion(self, helix: BackboneStructure) -> None:
        """강체 변환된 같은 구조의 RMSD는 0."""
        moved = random_rotation(helix, 9).with_coords(random_rotation(helix, 9).coords + 4.0)
        assert kabsch_rmsd(helix, moved) == pytest.approx(0.0, abs=1e-6)
        assert kabsch_rmsd(helix, moved, "backbone") == pytest.approx(0.0, abs=1e-6)

    def test_rmsd_symmetric(self, helix: BackboneStructure) -> None:
        other = synth_helix(20, seed=4, noise_std=0.5)
        assert kabsch_rmsd(helix, other) == pytest.approx(kabsch_rmsd(other, helix), abs=1e-9)

    def test_length_mismatch(self, helix: BackboneStructure) -> None:
        with pytest.raises(ShapeMismatch):
            kabsch_rmsd(helix, synth_helix(19))

    def test_no_overlap(self) -> None:
        a = BackboneStructure(np.ones((2, 4, 3)), np.arange(2), np.array([True, False]))
        b = BackboneStructure(np.ones((2, 4, 3)), np.arange(2), np.array([False, True]))
        with pytest.raises(EmptyOverlap):
            kabsch_rmsd(a, b)

    def test_align_structure(self, helix: BackboneStructure) -> None:
        """정렬 후 좌표가 목표와 일치."""
        moved = random_rotation(helix, 2)
        aligned = align_structure(moved, helix)
        np.testing.assert_allclose(aligned.coords, helix.coords, atol=1e-6)


def _brute_force_ca_rmsd(a: BackboneStructure, b: BackboneStructure, rng: np.random.Generator) -> float:
    """회전 벡터를 여러 시작점에서 직접 최소화한 CA RMSD."""
    pa = a.coords[:, 1] - a.coords[:, 1].mean(axis=0)
    pb = b.coords[:, 1] - b.coords[:, 1].mean(axis=0)

    def msd(rotvec: np.ndarray) -> float:
        moved = Rotation.from_rotvec(rotvec).apply(pa)
        return float(((moved - pb) ** 2).sum(axis=1).mean())

    starts = [np.zeros(3)] + [Rotation.random(random_state=rng).as_rotvec() for _ in range(9)]
    best = min(optimize.minimize(msd, x0, method="BFGS", options={"gtol": 1e-10}).fun for x0 in starts)
    return float(np.sqrt(best))


class TestKabschOracle:
    """Kabsch RMSD 를 직접 최소화한 값과 비교하는 테스트."""

    def test_matches_brute_force(self) -> None:
        rng = np.random.default_rng(0)
        for seed in range(20):
            a = synth_random_coil(8, seed=2 * seed)
            b = synth_random_coil(8, seed=2 * seed + 1)
            assert kabsch_rmsd(a, b) == pytest.approx(_brute_force_ca_rmsd(a, b, rng), abs=1e-4)


class TestRotationUniformity:
    """랜덤 회전이 SO(3) 위에서 균일한지 Monte Carlo 로 확인."""

    def test_moments(self) -> None:
        """고정 단위 벡터 v 에 대해 E[Rv] = 0, Cov[Rv] = I/3, E[tr R] = 0."""
        rng = np.random.default_rng(0)
        rotations = np.stack([random_rigid_rotation(rng).rotation for _ in range(5000)])
        v = np.array([0.0, 0.6, 0.8])
        rv = rotations @ v
        np.testing.assert_allclose(rv.mean(axis=0), 0.0, atol=0.04)
        np.testing.assert_allclose(np.cov(rv.T), np.eye(3) / 3, atol=0.03)
        assert np.trace(rotations, axis1=1, axis2=2).mean() == pytest.approx(0.0, abs=0.07)

    def test_structure_rotation_uses_generator(self, helix: BackboneStructure) -> None:
        """Generator 상태가 진행되면 다음 회전은 달라진다."""
        rng = np.random.default_rng(3)
        first = random_rotation(helix, rng)
        second = random_rotation(helix, rng)
        assert not np.allclose(first.coords, second.coords)
