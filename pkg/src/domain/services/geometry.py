"""강체 기하 연산 (중심화, 랜덤 회전, Kabsch 정렬)."""
from typing import Literal, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from common.errors import EmptyChain, EmptyOverlap, ShapeMismatch
from domain.entities.backbone_structure import ATOM_CA, BackboneStructure, RigidTransform

AtomSelection = Literal["ca", "backbone"]


def center_structure(structure: BackboneStructure) -> BackboneStructure:
    """유효 잔기 전체 원자의 중심을 원점으로 이동.

    Args:
        structure: 입력 구조.

    Returns:
        중심화된 구조.

    Raises:
        EmptyChain: 유효 잔기가 없을 때.
    """
    mask = structure.res_mask
    if not mask.any():
        raise EmptyChain("유효 잔기가 없어 중심화할 수 없습니다")
    centroid = structure.coords[mask].reshape(-1, 3).mean(axis=0)
    return structure.with_coords(structure.coords - centroid)


def random_rigid_rotation(seed: Optional[int | np.random.Generator] = None) -> RigidTransform:
    """균일 분포 SO(3) 회전 (평행이동 0).

    Args:
        seed: 정수 시드 또는 numpy Generator.

    Returns:
        RigidTransform.
    """
    rotation = Rotation.random(random_state=seed)
    return RigidTransform(rotation=rotation.as_matrix(), translation=np.zeros(3))


def random_rotation(
    structure: BackboneStructure, seed: Optional[int | np.random.Generator] = None
) -> BackboneStructure:
    """구조 전체에 균일 랜덤 회전 적용 (원점 기준, 같은 시드 → 같은 결과)."""
    return random_rigid_rotation(seed).apply_to(structure)


def superpose(
    mobile: np.ndarray,
    target: np.ndarray,
    weights: Optional[np.ndarray] = None,
) -> RigidTransform:
    """mobile을 target에 최적 정렬하는 강체 변환 (가중 Kabsch).

    Args:
        mobile: (n, 3) 이동할 점.
        target: (n, 3) 기준 점.
        weights: (n,) 비음수 가중치 (None이면 균등).

    Returns:
        mobile → target RigidTransform.
    """
    mobile = np.asarray(mobile, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if mobile.shape != target.shape or mobile.ndim != 2 or mobile.shape[1] != 3:
        raise ShapeMismatch(f"point sets must be matching (n, 3), got {mobile.shape} vs {target.shape}")
    w = np.ones(len(mobile)) if weights is None else np.asarray(weights, dtype=np.float64)
    w_sum = w.sum()
    mobile_c = (w[:, None] * mobile).sum(axis=0) / w_sum
    target_c = (w[:, None] * target).sum(axis=0) / w_sum
    if len(mobile) < 2:
        rotation_matrix = np.eye(3)
    else:
        # align_vectors(a, b)는 a ≈ R b 가 되는 R을 찾는다
        rotation, _ = Rotation.align_vectors(target - target_c, mobile - mobile_c, weights=w)
        rotation_matrix = rotation.as_matrix()
    translation = target_c - rotation_matrix @ mobile_c
    return RigidTransform(rotation=rotation_matrix, translation=translation)


def _select_points(
    a: BackboneStructure,
    b: BackboneStructure,
    atoms: AtomSelection,
) -> tuple[np.ndarray, np.ndarray]:
    """두 구조의 공통 유효 잔기에서 비교할 점 추출."""
    if a.n_res != b.n_res:
        raise ShapeMismatch(f"structures differ in length: {a.n_res} vs {b.n_res}")
    joint = a.res_mask & b.res_mask
    if not joint.any():
        raise EmptyOverlap("no jointly unmasked residues")
    if atoms == "ca":
        return a.coords[joint, ATOM_CA], b.coords[joint, ATOM_CA]
    return a.coords[joint].reshape(-1, 3), b.coords[joint].reshape(-1, 3)


def kabsch_rmsd(a: BackboneStructure, b: BackboneStructure, atoms: AtomSelection = "ca") -> float:
    """최적 강체 정렬 후 RMSD (Å).

    Args:
        a: 구조 A.
        b: 구조 B (같은 n_res).
        atoms: "ca" 또는 "backbone" (N, CA, C, O).

    Returns:
        RMSD (≥ 0, 대칭).

    Raises:
        ShapeMismatch: n_res가 다를 때.
        EmptyOverlap: 공통 유효 잔기가 없을 때.
    """
    pa, pb = _select_points(a, b, atoms)
    transform = superpose(pa, pb)
    diff = transform.apply(pa) - pb
    return float(np.sqrt(np.mean(np.sum(diff**2, axis=-1))))


def align_structure(mobile: BackboneStructure, target: BackboneStructure) -> BackboneStructure:
    """mobile 구조를 target에 CA 기준으로 정렬한 새 구조 반환."""
    pm, pt = _select_points(mobile, target, "ca")
    return superpose(pm, pt).apply_to(mobile)
