"""구조 지표 (TM-score, 다양성, novelty, 기하 유효성).

모든 함수는 numpy 배열 위에서 동작하며 잔기 대응은 인덱스 기준이다
(서열 정렬 없음).
"""
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.settings.constants import Constants
from common.errors import EmptyReference, InsufficientSamples, ShapeMismatch, TooShort
from domain.entities.backbone_structure import ATOM_C, ATOM_CA, ATOM_N, ATOM_O, BackboneStructure
from domain.services.geometry import superpose
from domain.value_objects.validity_report import ValidityReport

Similarity = Callable[[BackboneStructure, BackboneStructure], float]


def tm_d0(length: int) -> float:
    """TM-score 거리 스케일 d0(L) = 1.24·(L-15)^(1/3) - 1.8, 최소 0.5."""
    d0 = 1.24 * np.cbrt(length - 15.0) - 1.8
    return float(max(d0, Constants.TM_D0_MIN))


def _tm_from_points(pa: np.ndarray, pb: np.ndarray) -> float:
    """대응된 CA 점 집합의 TM-score (반복 가중 정렬, 최댓값)."""
    length = len(pa)
    d0 = tm_d0(length)
    weights = np.ones(length)
    best = 0.0
    previous = -1.0
    for _ in range(Constants.TM_MAX_ITERATIONS):
        transform = superpose(pa, pb, weights)
        dist = np.linalg.norm(transform.apply(pa) - pb, axis=-1)
        per_residue = 1.0 / (1.0 + (dist / d0) ** 2)
        score = float(per_residue.sum() / length)
        best = max(best, score)
        if abs(score - previous) < Constants.TM_TOLERANCE:
            break
        previous = score
        weights = per_residue
    return best


def tm_score(a: BackboneStructure, b: BackboneStructure) -> float:
    """같은 길이 두 구조의 TM-score (0, 1].

    Args:
        a: 구조 A.
        b: 구조 B.

    Returns:
        TM-score. 공통 유효 잔기 수를 L로 사용.

    Raises:
        ShapeMismatch: n_res가 다를 때.
        TooShort: 공통 유효 잔기가 3개 미만일 때.
    """
    if a.n_res != b.n_res:
        raise ShapeMismatch(f"structures differ in length: {a.n_res} vs {b.n_res}")
    joint = a.res_mask & b.res_mask
    if int(joint.sum()) < Constants.TM_MIN_LENGTH:
        raise TooShort(f"TM-score needs >= {Constants.TM_MIN_LENGTH} residues")
    return _tm_from_points(a.coords[joint, ATOM_CA], b.coords[joint, ATOM_CA])


def _truncate(structure: BackboneStructure, n_res: int) -> BackboneStructure:
    return BackboneStructure(
        coords=structure.coords[:n_res],
        res_index=structure.res_index[:n_res],
        res_mask=structure.res_mask[:n_res],
        chain_id=structure.chain_id,
    )


def tm_score_common_prefix(a: BackboneStructure, b: BackboneStructure) -> float:
    """길이가 다르면 공통 접두 길이로 잘라 비교하는 TM-score."""
    n = min(a.n_res, b.n_res)
    return tm_score(_truncate(a, n), _truncate(b, n))


def _select_designable(
    samples: Sequence[BackboneStructure],
    designable_mask: Optional[Sequence[bool]],
) -> list[BackboneStructure]:
    if designable_mask is None:
        return list(samples)
    if len(designable_mask) != len(samples):
        raise ShapeMismatch("designable_mask length must match samples")
    return [s for s, keep in zip(samples, designable_mask) if keep]


def _pair_scores(
    structures: Sequence[BackboneStructure],
    pairs: list[tuple[int, int]],
    similarity: Similarity,
    max_workers: int,
) -> list[float]:
    """쌍별 유사도 계산 (executor.map은 입력 순서를 보존)."""
    def score(pair: tuple[int, int]) -> float:
        return similarity(structures[pair[0]], structures[pair[1]])

    if max_workers <= 1:
        return [score(p) for p in pairs]
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(score, pairs))


def pairwise_diversity(
    samples: Sequence[BackboneStructure],
    designable_mask: Optional[Sequence[bool]] = None,
    max_workers: int = 1,
) -> float:
    """길이별 평균 쌍 TM-score를 길이 간 평균한 값 (DPT, 낮을수록 다양).

    Raises:
        InsufficientSamples: 어떤 길이에도 designable 샘플이 2개 이상 없을 때.
    """
    kept = _select_designable(samples, designable_mask)
    by_length: dict[int, list[BackboneStructure]] = {}
    for structure in kept:
        by_length.setdefault(structure.n_res, []).append(structure)
    per_length = []
    for length in sorted(by_length):
        group = by_length[length]
        if len(group) < 2:
            continue
        pairs = list(combinations(range(len(group)), 2))
        scores = _pair_scores(group, pairs, tm_score, max_workers)
        per_length.append(float(np.mean(scores)))
    if not per_length:
        raise InsufficientSamples("need >= 2 designable samples of the same length")
    return float(np.mean(per_length))


def cluster_labels(similarity_matrix: np.ndarray, threshold: float) -> np.ndarray:
    """유사도 ≥ threshold 간선의 연결 성분 (single-linkage) 라벨."""
    sim = np.asarray(similarity_matrix, dtype=np.float64)
    adjacency = csr_matrix(sim >= threshold)
    _, labels = connected_components(adjacency, directed=False)
    return labels


def cluster_diversity(
    samples: Sequence[BackboneStructure],
    designable_mask: Optional[Sequence[bool]] = None,
    threshold: float = Constants.CLUSTER_TM_THRESHOLD,
    similarity: Similarity = tm_score_common_prefix,
    max_workers: int = 1,
) -> float:
    """클러스터 수 / designable 샘플 수.

    Raises:
        InsufficientSamples: designable 샘플이 없을 때.
    """
    kept = _select_designable(samples, designable_mask)
    n = len(kept)
    if n == 0:
        raise InsufficientSamples("no designable samples")
    matrix = np.eye(n)
    pairs = list(combinations(range(n), 2))
    for (i, j), value in zip(pairs, _pair_scores(kept, pairs, similarity, max_workers)):
        matrix[i, j] = matrix[j, i] = value
    labels = cluster_labels(matrix, threshold)
    return len(np.unique(labels)) / n


def novelty(
    samples: Sequence[BackboneStructure],
    reference_set: Sequence[BackboneStructure],
    designable_mask: Optional[Sequence[bool]] = None,
    similarity: Similarity = tm_score_common_prefix,
) -> float:
    """샘플별 참조 집합 최대 TM-score의 평균 (낮을수록 새로움).

    Raises:
        EmptyReference: 참조 집합이 비었을 때.
        InsufficientSamples: designable 샘플이 없을 때.
    """
    if not reference_set:
        raise EmptyReference("reference set is empty")
    kept = _select_designable(samples, designable_mask)
    if not kept:
        raise InsufficientSamples("no designable samples")
    best = [max(similarity(s, ref) for ref in reference_set) for s in kept]
    return float(np.mean(best))


def _within(values: np.ndarray, bounds: tuple[float, float]) -> np.ndarray:
    low, high = bounds
    return (values >= low) & (values <= high)


def geometry_validity(structure: BackboneStructure) -> ValidityReport:
    """잔기별 결합 길이 검사.

    잔기 i는 N–CA, CA–C, C–O가 범위 안이고, 다음 잔기가 있으면 CA(i)–CA(i+1)도
    범위 안일 때 유효하다. 강체 변환에 불변.
    """
    coords = structure.coords
    mask = structure.res_mask
    n_ca = np.linalg.norm(coords[:, ATOM_N] - coords[:, ATOM_CA], axis=-1)
    ca_c = np.linalg.norm(coords[:, ATOM_CA] - coords[:, ATOM_C], axis=-1)
    c_o = np.linalg.norm(coords[:, ATOM_C] - coords[:, ATOM_O], axis=-1)
    valid = (
        _within(n_ca, Constants.VALID_N_CA)
        & _within(ca_c, Constants.VALID_CA_C)
        & _within(c_o, Constants.VALID_C_O)
        & mask
    )
    if structure.n_res > 1:
        ca_ca = np.linalg.norm(np.diff(coords[:, ATOM_CA], axis=0), axis=-1)
        link_ok = _within(ca_ca, Constants.VALID_CA_CA) | ~(mask[:-1] & mask[1:])
        valid[:-1] &= link_ok
    n_valid_res = int(mask.sum())
    fraction = float(valid.sum() / n_valid_res) if n_valid_res else 0.0
    return ValidityReport(per_residue=valid, fraction_valid=fraction)
