"""합성 backbone 생성 (이상적 α-helix, random coil).

내부 좌표(결합 길이, 결합각, 이면각)로부터 원자를 순차 배치한다.
φ = -57°, ψ = -47° 로 만든 helix는 잔기당 약 100° 회전, 1.5Å 상승한다.
"""
from typing import Optional

import numpy as np

from app.settings.constants import Constants
from common.errors import InvalidLength
from domain.entities.backbone_structure import BackboneStructure
from domain.services.geometry import center_structure

MIN_SYNTH_LENGTH = 4


def place_atom(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    bond: float,
    angle_deg: float,
    torsion_deg: float,
) -> np.ndarray:
    """a-b-c 다음 원자 d의 좌표.

    Args:
        a, b, c: 앞선 세 원자 좌표.
        bond: |c - d|.
        angle_deg: 결합각 b-c-d.
        torsion_deg: 이면각 a-b-c-d.

    Returns:
        (3,) 좌표.
    """
    angle = np.deg2rad(angle_deg)
    torsion = np.deg2rad(torsion_deg)
    bc = c - b
    bc /= np.linalg.norm(bc)
    n = np.cross(b - a, bc)
    n /= np.linalg.norm(n)
    m = np.stack([bc, np.cross(n, bc), n], axis=1)
    d_local = np.array([
        -bond * np.cos(angle),
        bond * np.sin(angle) * np.cos(torsion),
        bond * np.sin(angle) * np.sin(torsion),
    ])
    return c + m @ d_local


def build_backbone(phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """이면각 열로부터 (n_res, 4, 3) backbone 좌표 생성.

    Args:
        phi: (n_res,) φ (°). 첫 잔기 값은 사용하지 않음.
        psi: (n_res,) ψ (°).

    Returns:
        (n_res, 4, 3) 좌표 (N, CA, C, O).
    """
    n_res = len(phi)
    coords = np.zeros((n_res, 4, 3))
    # 첫 잔기: N-CA-C 평면 배치
    n0 = np.array([0.0, 0.0, 0.0])
    ca0 = np.array([Constants.BOND_N_CA, 0.0, 0.0])
    angle = np.deg2rad(180.0 - Constants.ANGLE_N_CA_C)
    c0 = ca0 + Constants.BOND_CA_C * np.array([np.cos(angle), np.sin(angle), 0.0])
    coords[0, 0], coords[0, 1], coords[0, 2] = n0, ca0, c0
    for i in range(n_res):
        n_i, ca_i, c_i = coords[i, 0], coords[i, 1], coords[i, 2]
        coords[i, 3] = place_atom(
            n_i, ca_i, c_i, Constants.BOND_C_O, Constants.ANGLE_CA_C_O, psi[i] + 180.0
        )
        if i + 1 == n_res:
            break
        n_next = place_atom(n_i, ca_i, c_i, Constants.BOND_C_N, Constants.ANGLE_CA_C_N, psi[i])
        ca_next = place_atom(ca_i, c_i, n_next, Constants.BOND_N_CA, Constants.ANGLE_C_N_CA, Constants.OMEGA)
        c_next = place_atom(c_i, n_next, ca_next, Constants.BOND_CA_C, Constants.ANGLE_N_CA_C, phi[i + 1])
        coords[i + 1, 0], coords[i + 1, 1], coords[i + 1, 2] = n_next, ca_next, c_next
    return coords


def _finish(coords: np.ndarray, noise_std: float, rng: np.random.Generator) -> BackboneStructure:
    if noise_std > 0.0:
        coords = coords + rng.normal(0.0, noise_std, size=coords.shape)
    return center_structure(BackboneStructure.from_coords(coords))


def synth_helix(n_res: int, seed: Optional[int] = None, noise_std: float = 0.0) -> BackboneStructure:
    """이상적 α-helix backbone + 선택적 등방성 Gaussian 노이즈.

    Args:
        n_res: 잔기 수 (≥ 4).
        seed: 노이즈 시드.
        noise_std: 원자별 좌표 노이즈 표준편차 (Å).

    Returns:
        중심화된 BackboneStructure (마스크 없음).

    Raises:
        InvalidLength: n_res < 4.
    """
    if n_res < MIN_SYNTH_LENGTH:
        raise InvalidLength(f"n_res must be >= {MIN_SYNTH_LENGTH}, got {n_res}")
    phi = np.full(n_res, Constants.HELIX_PHI)
    psi = np.full(n_res, Constants.HELIX_PSI)
    return _finish(build_backbone(phi, psi), noise_std, np.random.default_rng(seed))


def synth_random_coil(n_res: int, seed: Optional[int] = None, noise_std: float = 0.0) -> BackboneStructure:
    """무작위 이면각 coil (β/PPII 영역 위주, 이상적 결합 기하)."""
    if n_res < MIN_SYNTH_LENGTH:
        raise InvalidLength(f"n_res must be >= {MIN_SYNTH_LENGTH}, got {n_res}")
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-160.0, -60.0, size=n_res)
    psi = rng.uniform(100.0, 170.0, size=n_res)
    return _finish(build_backbone(phi, psi), noise_std, rng)


def synth_corpus(
    n_structures: int,
    min_len: int,
    max_len: int,
    noise_std: float,
    seed: int,
) -> list[BackboneStructure]:
    """길이가 [min_len, max_len]에서 균등 추출된 helix 코퍼스."""
    if min_len < MIN_SYNTH_LENGTH or max_len < min_len:
        raise InvalidLength(f"invalid length range [{min_len}, {max_len}]")
    rng = np.random.default_rng(seed)
    lengths = rng.integers(min_len, max_len + 1, size=n_structures)
    seeds = rng.integers(0, 2**31 - 1, size=n_structures)
    return [synth_helix(int(n), int(s), noise_std) for n, s in zip(lengths, seeds)]
