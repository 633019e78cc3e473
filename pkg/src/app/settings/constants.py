"""애플리케이션 상수 정의."""
from typing import Final


class Constants:
    """애플리케이션 상수 클래스.

    모델 기본 하이퍼파라미터, 기하 검증 범위, 파일 이름 등 매직 넘버를
    중앙에서 관리합니다. 모든 상수는 UPPER_SNAKE_CASE + Final 타입 힌팅.
    """

    # ============================================================================
    # 애플리케이션 정보
    # ============================================================================

    APP_NAME: Final[str] = "ProteinAE-Desk"
    """애플리케이션 이름."""

    RUN_DIR_ENV_VAR: Final[str] = "PROTEINAE_RUN_DIR"
    """출력 루트 디렉토리를 덮어쓰는 환경 변수."""

    SLOW_TESTS_ENV_VAR: Final[str] = "PROTEINAE_RUN_SLOW"
    """느린 수용 테스트 활성화 환경 변수."""

    # ============================================================================
    # 시간 변환 상수
    # ============================================================================

    MILLISECONDS_PER_SECOND: Final[int] = 1000
    """1초의 밀리초 수."""

    BYTES_PER_MB: Final[int] = 1024 * 1024
    """1MB의 바이트 수 (메모리 로그용)."""

    # ============================================================================
    # Backbone 원자 정의
    # ============================================================================

    BACKBONE_ATOMS: Final[tuple[str, ...]] = ("N", "CA", "C", "O")
    """잔기당 backbone 원자 이름 (순서 고정)."""

    BACKBONE_ELEMENTS: Final[tuple[str, ...]] = ("N", "C", "C", "O")
    """backbone 원자 원소 기호."""

    ATOMS_PER_RESIDUE: Final[int] = 4
    """잔기당 원자 수."""

    # ============================================================================
    # 기하 검증 범위 (Å)
    # ============================================================================

    INGEST_CA_CA_MIN: Final[float] = 2.0
    """구조 입력 검증 시 인접 CA–CA 최소 거리 (배타)."""

    INGEST_CA_CA_MAX: Final[float] = 4.5
    """구조 입력 검증 시 인접 CA–CA 최대 거리 (배타)."""

    VALID_CA_CA: Final[tuple[float, float]] = (3.0, 4.5)
    """geometry_validity CA(i)–CA(i+1) 허용 범위."""

    VALID_N_CA: Final[tuple[float, float]] = (1.2, 1.8)
    """geometry_validity N–CA 허용 범위."""

    VALID_CA_C: Final[tuple[float, float]] = (1.3, 1.8)
    """geometry_validity CA–C 허용 범위."""

    VALID_C_O: Final[tuple[float, float]] = (1.0, 1.5)
    """geometry_validity C–O 허용 범위."""

    # ============================================================================
    # 이상적 backbone 내부 좌표 (결합 길이 Å, 각도 °)
    # ============================================================================

    BOND_N_CA: Final[float] = 1.458
    BOND_CA_C: Final[float] = 1.525
    BOND_C_N: Final[float] = 1.329
    BOND_C_O: Final[float] = 1.231
    ANGLE_N_CA_C: Final[float] = 111.2
    ANGLE_CA_C_N: Final[float] = 116.2
    ANGLE_C_N_CA: Final[float] = 121.7
    ANGLE_CA_C_O: Final[float] = 120.5
    HELIX_PHI: Final[float] = -57.0
    """α-helix φ. 이 값과 ψ로 만든 helix는 잔기당 ~100° 회전, ~1.5Å 상승."""
    HELIX_PSI: Final[float] = -47.0
    OMEGA: Final[float] = 180.0

    # ============================================================================
    # 특징화 (featurization)
    # ============================================================================

    RELPOS_CLIP: Final[int] = 32
    """상대 위치 클리핑 범위 (±32 → one-hot 65)."""

    RBF_COUNT: Final[int] = 16
    """거리 RBF 개수."""

    RBF_MIN: Final[float] = 0.0
    RBF_MAX: Final[float] = 20.0
    RBF_WIDTH: Final[float] = 1.25

    TIME_EMBED_MAX_FREQUENCY: Final[float] = 1000.0
    """Fourier 시간 임베딩 최대 주파수 (주파수는 1..max 로그 간격)."""

    REF_NAME_CHARS: Final[int] = 4
    """참조 원자 이름 문자 수."""

    REF_NAME_VOCAB: Final[int] = 64
    """원자 이름 문자 one-hot 크기 (ord(c) - 32)."""

    REF_ELEMENTS: Final[tuple[str, ...]] = ("C", "N", "O", "S")
    """참조 원소 one-hot 어휘 (마지막 슬롯은 '기타')."""

    REF_SPACE_UID_STRIDE: Final[int] = 4
    """ref_space_uid = 원자 인덱스 // 4."""

    # ============================================================================
    # 모델 기본값 (autoencoder)
    # ============================================================================

    AE_LAYERS: Final[int] = 5
    AE_TOKEN_DIM: Final[int] = 256
    AE_HEADS: Final[int] = 8
    AE_COND_DIM: Final[int] = 256
    AE_PAIR_DIM: Final[int] = 128
    AE_REGISTERS: Final[int] = 4
    AE_LATENT_DIM: Final[int] = 8
    AE_DOWNSAMPLE: Final[int] = 1
    AE_ODE_STEPS: Final[int] = 20
    TIME_EMBED_DIM: Final[int] = 256
    ATOM_DIM: Final[int] = 64
    ATOM_PAIR_DIM: Final[int] = 16
    ATOM_LAYERS: Final[int] = 3
    ATOM_HEADS: Final[int] = 4
    ATOM_QUERIES: Final[int] = 32
    ATOM_KEYS: Final[int] = 128
    SELF_COND_PROB: Final[float] = 0.5
    TRANSITION_EXPANSION: Final[int] = 4
    ROPE_BASE: Final[float] = 10000.0
    ADALN_ZERO_GATE_BIAS: Final[float] = -2.0
    """transition 출력 gate 초기 bias (sigmoid(-2) ≈ 0.12)."""

    MASK_BIAS: Final[float] = -1e10
    """attention 차단 bias."""

    # ============================================================================
    # 모델 기본값 (PLDM, 데스크 스케일)
    # ============================================================================

    PLDM_LAYERS: Final[int] = 4
    PLDM_TOKEN_DIM: Final[int] = 128
    PLDM_HEADS: Final[int] = 4
    PLDM_COND_DIM: Final[int] = 128
    PLDM_REGISTERS: Final[int] = 4
    SDE_STEPS: Final[int] = 200
    SDE_GAMMA: Final[float] = 0.45
    SDE_T_CLAMP_EPS: Final[float] = 1e-3

    # ============================================================================
    # 학습
    # ============================================================================

    LEARNING_RATE: Final[float] = 1e-4
    GRAD_CLIP_NORM: Final[float] = 1.0
    BATCH_SIZE: Final[int] = 8
    TRAIN_STEPS: Final[int] = 5000
    LOG_EVERY: Final[int] = 50
    CHECKPOINT_EVERY: Final[int] = 1000
    TIME_UNIFORM_WEIGHT: Final[float] = 0.02
    TIME_BETA_A: Final[float] = 1.9
    TIME_BETA_B: Final[float] = 1.0

    # ============================================================================
    # 합성 데이터셋
    # ============================================================================

    SYNTH_STRUCTURES: Final[int] = 50
    SYNTH_MIN_LEN: Final[int] = 16
    SYNTH_MAX_LEN: Final[int] = 48
    SYNTH_NOISE_STD: Final[float] = 0.1

    # ============================================================================
    # 평가 / probe
    # ============================================================================

    TM_MIN_LENGTH: Final[int] = 3
    TM_D0_MIN: Final[float] = 0.5
    TM_MAX_ITERATIONS: Final[int] = 20
    TM_TOLERANCE: Final[float] = 1e-8
    CLUSTER_TM_THRESHOLD: Final[float] = 0.5
    DESIGNABLE_VALIDITY_FRACTION: Final[float] = 0.9
    LENGTH_BUCKET_WIDTH: Final[int] = 16
    PROBE_HIDDEN_DIM: Final[int] = 512
    PROBE_EPOCHS: Final[int] = 300
    PROBE_BATCH_SIZE: Final[int] = 8
    PROBE_HELDOUT_FRACTION: Final[float] = 0.2

    # ============================================================================
    # 파일 / 출력
    # ============================================================================

    STRUCTURE_EXTENSIONS: Final[tuple[str, ...]] = (".pdb", ".cif", ".mmcif")
    """구조 파일 확장자 (소문자)."""

    CONFIG_SNAPSHOT_NAME: Final[str] = "config.json"
    LOSS_CSV_NAME: Final[str] = "loss.csv"
    REPORT_NAME: Final[str] = "report.jsonl"
    LATENT_CACHE_NAME: Final[str] = "latents.db"
    CHECKPOINT_SUFFIX: Final[str] = ".ckpt"
    LOG_DIR_NAME: Final[str] = "logs"
    DEFAULT_OUTPUT_DIR: Final[str] = "runs"

    # ============================================================================
    # 로그
    # ============================================================================

    MAX_LOG_ENTRIES: Final[int] = 5000
    """메모리에 유지할 최대 로그 수."""

    LOG_FILE_ENCODING: Final[str] = "utf-8"
    """로그/리포트 파일 인코딩."""

    LOG_CONTEXT_MAX_CHARS: Final[int] = 200
    """콘솔 출력 시 context JSON 최대 길이."""
