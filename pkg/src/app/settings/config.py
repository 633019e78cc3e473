"""실행 설정 (pydantic).

설정 파일은 JSON 텍스트이며 모든 모델은 ``extra="forbid"``로 알 수 없는 키를
거부한다. 에러 메시지에는 ``train.learning_rate`` 형태의 점 경로가 포함된다.
"""
import json
import os
from pathlib import Path
from typing import Literal, Optional

import xxhash
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.settings.constants import Constants
from common.errors import ConfigError


class _StrictModel(BaseModel):
    """알 수 없는 키를 거부하는 베이스 모델."""

    model_config = ConfigDict(extra="forbid")


class DiTSettings(_StrictModel):
    """DiT 스택 설정."""

    n_layers: int = Field(default=Constants.AE_LAYERS, ge=1)
    token_dim: int = Field(default=Constants.AE_TOKEN_DIM, ge=2)
    n_heads: int = Field(default=Constants.AE_HEADS, ge=1)
    c_cond: int = Field(default=Constants.AE_COND_DIM, ge=1)
    c_pair: int = Field(default=Constants.AE_PAIR_DIM, ge=1)
    n_registers: int = Field(default=Constants.AE_REGISTERS, ge=0)

    @model_validator(mode="after")
    def _check_heads(self) -> "DiTSettings":
        if self.token_dim % self.n_heads != 0:
            raise ValueError("token_dim must be divisible by n_heads")
        if (self.token_dim // self.n_heads) % 2 != 0:
            raise ValueError("head dimension (token_dim / n_heads) must be even")
        return self


class AutoencoderSettings(_StrictModel):
    """ProteinAE 설정."""

    dit: DiTSettings = Field(default_factory=DiTSettings)
    latent_dim: int = Field(default=Constants.AE_LATENT_DIM, ge=1)
    downsample: Literal[1, 2, 4] = Constants.AE_DOWNSAMPLE
    ode_steps: int = Field(default=Constants.AE_ODE_STEPS, ge=1)
    time_embed_dim: int = Field(default=Constants.TIME_EMBED_DIM, ge=2)
    c_atom: int = Field(default=Constants.ATOM_DIM, ge=2)
    c_atompair: int = Field(default=Constants.ATOM_PAIR_DIM, ge=1)
    atom_layers: int = Field(default=Constants.ATOM_LAYERS, ge=1)
    atom_heads: int = Field(default=Constants.ATOM_HEADS, ge=1)
    n_queries: int = Field(default=Constants.ATOM_QUERIES, ge=2)
    n_keys: int = Field(default=Constants.ATOM_KEYS, ge=2)
    self_cond_prob: float = Field(default=Constants.SELF_COND_PROB, ge=0.0, le=1.0)

    @field_validator("time_embed_dim")
    @classmethod
    def _even_time_dim(cls, value: int) -> int:
        if value % 2 != 0:
            raise ValueError("time_embed_dim must be even")
        return value

    @model_validator(mode="after")
    def _check_latent(self) -> "AutoencoderSettings":
        if self.latent_dim > self.dit.token_dim:
            raise ValueError("latent_dim must be <= dit.token_dim")
        if self.c_atom % self.atom_heads != 0 or (self.c_atom // self.atom_heads) % 2 != 0:
            raise ValueError("c_atom / atom_heads must be an even integer")
        return self


class SDESettings(_StrictModel):
    """PLDM 샘플러 설정."""

    gamma: float = Field(default=Constants.SDE_GAMMA, ge=0.0)
    n_steps: int = Field(default=Constants.SDE_STEPS, ge=1)
    g_schedule: Literal["one_minus_t", "constant", "zero"] = "one_minus_t"
    t_clamp_eps: float = Field(default=Constants.SDE_T_CLAMP_EPS, gt=0.0)


class PLDMSettings(_StrictModel):
    """PLDM 설정 (데스크 스케일 기본값)."""

    dit: DiTSettings = Field(default_factory=lambda: DiTSettings(
        n_layers=Constants.PLDM_LAYERS,
        token_dim=Constants.PLDM_TOKEN_DIM,
        n_heads=Constants.PLDM_HEADS,
        c_cond=Constants.PLDM_COND_DIM,
        n_registers=Constants.PLDM_REGISTERS,
    ))
    time_embed_dim: int = Field(default=Constants.TIME_EMBED_DIM, ge=2)
    sde: SDESettings = Field(default_factory=SDESettings)
    renormalize_samples: bool = False
    """True면 생성 latent에 LayerNorm(학습 파라미터 없음)을 다시 적용."""


class ModelSettings(_StrictModel):
    """모델 설정 묶음."""

    autoencoder: AutoencoderSettings = Field(default_factory=AutoencoderSettings)
    pldm: PLDMSettings = Field(default_factory=PLDMSettings)


class TimeSamplerSettings(_StrictModel):
    """t 샘플러 혼합 분포: w·U(0,1) + (1-w)·Beta(a, b)."""

    uniform_weight: float = Field(default=Constants.TIME_UNIFORM_WEIGHT, ge=0.0, le=1.0)
    beta_a: float = Field(default=Constants.TIME_BETA_A, gt=0.0)
    beta_b: float = Field(default=Constants.TIME_BETA_B, gt=0.0)


class TrainSettings(_StrictModel):
    """학습 설정."""

    seed: int = 0
    batch_size: int = Field(default=Constants.BATCH_SIZE, ge=1)
    learning_rate: float = Field(default=Constants.LEARNING_RATE, gt=0.0)
    grad_clip: float = Field(default=Constants.GRAD_CLIP_NORM, gt=0.0)
    steps: int = Field(default=Constants.TRAIN_STEPS, ge=1)
    epochs: Optional[int] = Field(default=None, ge=1)
    """지정하면 steps 대신 epoch 수 × ceil(N / batch) 스텝 학습."""
    log_every: int = Field(default=Constants.LOG_EVERY, ge=1)
    checkpoint_every: int = Field(default=Constants.CHECKPOINT_EVERY, ge=1)
    device: str = "cpu"


class DataSettings(_StrictModel):
    """데이터셋 설정. input_dir이 없으면 합성 helix 코퍼스 사용."""

    input_dir: Optional[Path] = None
    chain: Optional[str] = None
    synthetic_structures: int = Field(default=Constants.SYNTH_STRUCTURES, ge=1)
    synthetic_min_len: int = Field(default=Constants.SYNTH_MIN_LEN, ge=4)
    synthetic_max_len: int = Field(default=Constants.SYNTH_MAX_LEN, ge=4)
    synthetic_noise_std: float = Field(default=Constants.SYNTH_NOISE_STD, ge=0.0)
    synthetic_seed: int = 0

    @model_validator(mode="after")
    def _check_range(self) -> "DataSettings":
        if self.synthetic_min_len > self.synthetic_max_len:
            raise ValueError("synthetic_min_len must be <= synthetic_max_len")
        return self


class EvaluationSettings(_StrictModel):
    """평가 설정."""

    cluster_threshold: float = Field(default=Constants.CLUSTER_TM_THRESHOLD, gt=0.0, le=1.0)
    designable_validity_fraction: float = Field(
        default=Constants.DESIGNABLE_VALIDITY_FRACTION, ge=0.0, le=1.0
    )
    length_bucket_width: int = Field(default=Constants.LENGTH_BUCKET_WIDTH, ge=1)
    max_workers: int = Field(default=1, ge=1)


class ProbeSettings(_StrictModel):
    """유연성 probe 설정."""

    hidden_dim: int = Field(default=Constants.PROBE_HIDDEN_DIM, ge=1)
    epochs: int = Field(default=Constants.PROBE_EPOCHS, ge=1)
    batch_size: int = Field(default=Constants.PROBE_BATCH_SIZE, ge=1)
    learning_rate: float = Field(default=Constants.LEARNING_RATE, gt=0.0)
    heldout_fraction: float = Field(default=Constants.PROBE_HELDOUT_FRACTION, gt=0.0, lt=1.0)
    seed: int = 0


class IOSettings(_StrictModel):
    """출력 설정."""

    output_dir: Path = Path(Constants.DEFAULT_OUTPUT_DIR)
    run_name: str = "default"


class RunConfig(_StrictModel):
    """최상위 실행 설정."""

    model: ModelSettings = Field(default_factory=ModelSettings)
    time_sampler: TimeSamplerSettings = Field(default_factory=TimeSamplerSettings)
    train: TrainSettings = Field(default_factory=TrainSettings)
    data: DataSettings = Field(default_factory=DataSettings)
    evaluation: EvaluationSettings = Field(default_factory=EvaluationSettings)
    probe: ProbeSettings = Field(default_factory=ProbeSettings)
    io: IOSettings = Field(default_factory=IOSettings)

    def run_dir(self) -> Path:
        """이번 실행의 출력 디렉토리 (output_dir / run_name)."""
        return self.io.output_dir / self.io.run_name


def _format_validation_error(error: ValidationError) -> str:
    """pydantic 에러를 '점 경로: 메시지' 목록으로 변환."""
    parts = []
    for item in error.errors():
        path = ".".join(str(loc) for loc in item["loc"]) or "<root>"
        parts.append(f"{path}: {item['msg']}")
    return "; ".join(parts)


def parse_run_config(text: str) -> RunConfig:
    """JSON 텍스트를 RunConfig로 파싱.

    Args:
        text: JSON 텍스트.

    Returns:
        검증된 RunConfig.

    Raises:
        ConfigError: JSON 형식 오류, 알 수 없는 키, 값 검증 실패 시.
    """
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"설정 검증 실패: {_format_validation_error(e)}") from e


def apply_env_overrides(config: RunConfig, environ: Optional[dict[str, str]] = None) -> RunConfig:
    """환경 변수 덮어쓰기 적용 (PROTEINAE_RUN_DIR → io.output_dir).

    Args:
        config: 원본 설정.
        environ: 환경 변수 매핑 (None이면 os.environ).

    Returns:
        덮어쓰기가 반영된 새 RunConfig.
    """
    env = os.environ if environ is None else environ
    run_dir = env.get(Constants.RUN_DIR_ENV_VAR)
    if not run_dir:
        return config
    io = config.io.model_copy(update={"output_dir": Path(run_dir)})
    return config.model_copy(update={"io": io})


def load_run_config(path: Optional[Path], environ: Optional[dict[str, str]] = None) -> RunConfig:
    """설정 파일 로드 + 환경 변수 덮어쓰기.

    Args:
        path: JSON 설정 파일 경로 (None이면 기본값).
        environ: 환경 변수 매핑 (테스트용).

    Returns:
        RunConfig.

    Raises:
        ConfigError: 파일이 없거나 검증에 실패한 경우.
    """
    if path is None:
        config = RunConfig()
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"설정 파일을 읽을 수 없습니다: {path}") from e
        config = parse_run_config(text)
    return apply_env_overrides(config, environ)


def dump_run_config(config: RunConfig) -> str:
    """RunConfig를 정규화된 JSON 텍스트로 직렬화."""
    return json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True, ensure_ascii=False)


def config_hash(config: RunConfig) -> str:
    """설정 해시 (xxhash64, 정규화 JSON 기준)."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return xxhash.xxh64(canonical.encode("utf-8")).hexdigest()
